from dataclasses import dataclass

import librosa
import numpy as np
import scipy.fft
import scipy.signal

from utils import DataError
from datasets import DEFAULT_SAMPLE_RATE
from ._pitch import frame_signal, ANALYSIS_HOP, ANALYSIS_WINDOW

CEPSTRAL_ORDER = 24
N_MELS = 40


@dataclass
class CepstraMatrix:
    """Mel-cepstral coefficients 0..M per 10 ms frame."""
    values: np.ndarray
    hop: int = ANALYSIS_HOP

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise DataError('Cepstra must form a frames x coefficients matrix')
        if not np.all(np.isfinite(self.values)):
            raise DataError('Cepstra contain non-finite values')

    def __len__(self):
        return self.values.shape[0]

    @property
    def order(self):
        return self.values.shape[1] - 1


def mel_cepstrum(waveform, order=CEPSTRAL_ORDER, n_mels=N_MELS):
    '''
    Hann-windowed power spectrum -> mel filterbank -> log magnitude -> orthonormal DCT-II.
    A uniform gain only moves coefficient 0.
    :param waveform: Waveform at 16 kHz
    :return: CepstraMatrix with floor((max(len, 512) - 512) / 160) + 1 rows
    '''
    if waveform.sample_rate != DEFAULT_SAMPLE_RATE:
        raise DataError('Cepstral analysis expects {} Hz audio, got {} Hz'.format(
            DEFAULT_SAMPLE_RATE, waveform.sample_rate))
    frames = frame_signal(waveform) * scipy.signal.get_window('hann', ANALYSIS_WINDOW)
    power = np.abs(np.fft.rfft(frames, n=ANALYSIS_WINDOW, axis=1)) ** 2
    filterbank = librosa.filters.mel(sr=waveform.sample_rate, n_fft=ANALYSIS_WINDOW, n_mels=n_mels,
                                     fmin=0.0, fmax=waveform.sample_rate / 2)
    log_mel = 0.5 * np.log(np.maximum(power @ filterbank.T, 1e-20))
    cepstra = scipy.fft.dct(log_mel, type=2, norm='ortho', axis=1)[:, :order + 1]
    return CepstraMatrix(values=cepstra)
