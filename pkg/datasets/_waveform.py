import os
from dataclasses import dataclass
from typing import Optional

import numpy as np
import soundfile as sf

from utils import DataError, NumericError

DEFAULT_SAMPLE_RATE = 16000
DEFAULT_HOP = 320

_COMPRESSED_SUBTYPES = {'ULAW', 'ALAW', 'IMA_ADPCM', 'MS_ADPCM', 'GSM610', 'G721_32', 'G723_24', 'G723_40',
                        'NMS_ADPCM_16', 'NMS_ADPCM_24', 'NMS_ADPCM_32', 'MPEG_LAYER_III'}


class WavFormatError(DataError):
    pass


class MissingFileError(WavFormatError):
    pass


class ChannelCountError(WavFormatError):
    pass


class BitDepthError(WavFormatError):
    pass


class CompressionError(WavFormatError):
    pass


@dataclass
class Waveform:
    """
    Mono waveform with amplitudes nominally in [-1, 1].
    Corpus audio carries its utterance id and generator labels; converted audio carries neither.
    """
    samples: np.ndarray
    sample_rate: int = DEFAULT_SAMPLE_RATE
    utterance_id: Optional[str] = None
    labels: Optional[object] = None

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise DataError('Waveform samples must be one-dimensional, got shape {}'.format(self.samples.shape))
        if self.sample_rate <= 0:
            raise ValueError('Sample rate must be positive')

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self):
        return len(self) / self.sample_rate

    def is_finite(self):
        return bool(np.all(np.isfinite(self.samples)))


@dataclass(frozen=True)
class FrameGrid:
    hop: int = DEFAULT_HOP
    window: int = DEFAULT_HOP

    def __post_init__(self):
        if self.hop <= 0:
            raise ValueError('Frame hop must be positive')
        if self.window < self.hop:
            raise ValueError('Frame window must not be shorter than the hop')


def segment_count(waveform, grid):
    """
    Number of whole segments S = floor(len / hop)
    :param waveform: Waveform instance or 1-D array
    :param grid: FrameGrid instance
    :return: int
    """
    return len(waveform) // grid.hop


def read_wav(path):
    '''
    Reads a mono 16-bit PCM WAV file.
    :param path: path to the file
    :return: Waveform with samples scaled by 1/32768
    '''
    if not os.path.isfile(path):
        raise MissingFileError('WAV file not found: {}'.format(path))
    try:
        info = sf.info(path)
    except RuntimeError as e:
        raise WavFormatError('Cannot parse WAV header of {}: {}'.format(path, e)) from e
    if info.format != 'WAV':
        raise WavFormatError('{} is not a RIFF WAV file (format {})'.format(path, info.format))
    if info.channels != 1:
        raise ChannelCountError('{} has {} channels; only mono is supported'.format(path, info.channels))
    if info.subtype in _COMPRESSED_SUBTYPES:
        raise CompressionError('{} uses compressed encoding {}'.format(path, info.subtype))
    if info.subtype != 'PCM_16':
        raise BitDepthError('{} uses {}; only 16-bit PCM is supported'.format(path, info.subtype))
    data, sample_rate = sf.read(path, dtype='int16', always_2d=False)
    return Waveform(samples=data.astype(np.float64) / 32768.0, sample_rate=int(sample_rate))


def quantize(samples):
    """Hard-clips to [-1, 1] and maps to int16."""
    clipped = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    return np.clip(np.rint(clipped * 32768.0), -32768, 32767).astype(np.int16)


def write_wav(waveform, path):
    '''
    Writes a mono 16-bit PCM WAV file. Out-of-range samples are clipped, not rejected.
    :param waveform: Waveform instance
    :param path: target file path
    '''
    if not waveform.is_finite():
        raise NumericError('Cannot write non-finite samples to {}'.format(path))
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory):
        raise DataError('Cannot write {}: directory does not exist'.format(path))
    try:
        sf.write(path, quantize(waveform.samples), waveform.sample_rate, subtype='PCM_16', format='WAV')
    except (RuntimeError, OSError) as e:
        raise DataError('Cannot write {}: {}'.format(path, e)) from e
