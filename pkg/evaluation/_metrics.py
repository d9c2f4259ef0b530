import numpy as np

from utils import DataError
from ._cepstrum import mel_cepstrum
from ._dtw import dtw_align

MCD_CONSTANT = 10.0 / np.log(10.0) * np.sqrt(2.0)
FFE_PITCH_TOLERANCE = 0.2
MAX_LENGTH_MISMATCH = 0.2


def mcd_from_cepstra(reference, converted):
    '''
    Mel-cepstral distortion over the DTW path, coefficient 0 excluded.
    :param reference: CepstraMatrix
    :param converted: CepstraMatrix
    :return: MCD in dB
    '''
    if reference.order != converted.order:
        raise DataError('Cepstral orders differ: {} vs {}'.format(reference.order, converted.order))
    alignment = dtw_align(reference, converted)
    diff = reference.values[alignment.path[:, 0], 1:] - converted.values[alignment.path[:, 1], 1:]
    return float(np.mean(MCD_CONSTANT * np.sqrt(np.sum(diff ** 2, axis=1))))


def mcd(reference, converted):
    return mcd_from_cepstra(mel_cepstrum(reference), mel_cepstrum(converted))


def _aligned(ref, conv):
    n_ref, n_conv = len(ref), len(conv)
    if n_ref == 0 or n_conv == 0:
        raise DataError('Cannot compare empty F0 tracks')
    longest = max(n_ref, n_conv)
    if abs(n_ref - n_conv) > MAX_LENGTH_MISMATCH * longest:
        raise DataError('F0 tracks differ in length by more than {:.0%}: {} vs {} frames'.format(
            MAX_LENGTH_MISMATCH, n_ref, n_conv))
    n = min(n_ref, n_conv)
    return ref.f0[:n], ref.voiced[:n], conv.f0[:n], conv.voiced[:n]


def vde(ref, conv):
    """Fraction of frames whose voicing decisions differ."""
    _, v_ref, _, v_conv = _aligned(ref, conv)
    return float(np.mean(v_ref != v_conv))


def ffe(ref, conv):
    """Fraction of frames with a voicing error or a pitch deviation above 20% of the reference."""
    f_ref, v_ref, f_conv, v_conv = _aligned(ref, conv)
    both = v_ref & v_conv
    gross = np.zeros_like(both)
    gross[both] = np.abs(f_conv[both] - f_ref[both]) > FFE_PITCH_TOLERANCE * f_ref[both]
    return float(np.mean((v_ref != v_conv) | gross))


def f0_rmse(ref, conv):
    """RMSE in Hz over frames voiced in both tracks."""
    f_ref, v_ref, f_conv, v_conv = _aligned(ref, conv)
    both = v_ref & v_conv
    if not both.any():
        raise DataError('No mutually voiced frames; F0-RMSE is undefined')
    return float(np.sqrt(np.mean((f_ref[both] - f_conv[both]) ** 2)))
