from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from utils import DataError
from datasets import DEFAULT_SAMPLE_RATE, DEFAULT_HOP


class SampleRateError(DataError):
    pass


@dataclass(frozen=True)
class EncoderDims:
    content: int = 16
    speaker: int = 8
    emotion: int = 4

    def __post_init__(self):
        if min(self.content, self.speaker, self.emotion) <= 0:
            raise ValueError('Encoder dimensions must be positive')

    @property
    def total(self):
        return self.content + self.speaker + self.emotion


TOY_DIMS = EncoderDims(16, 8, 4)
FULL_SCALE_DIMS = EncoderDims(256, 256, 128)


@dataclass
class ContentMatrix:
    values: np.ndarray
    hop: int = DEFAULT_HOP

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.ndim != 2:
            raise DataError('Content matrix must be two-dimensional, got shape {}'.format(self.values.shape))
        if not np.all(np.isfinite(self.values)):
            raise DataError('Content matrix contains non-finite values')

    @property
    def rows(self):
        return self.values.shape[0]

    @property
    def dim(self):
        return self.values.shape[1]


@dataclass
class SpeakerVector:
    values: np.ndarray
    unit_norm: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.ndim != 1 or not np.all(np.isfinite(self.values)):
            raise DataError('Speaker vector must be a finite one-dimensional array')
        if self.unit_norm and abs(np.linalg.norm(self.values) - 1.0) > 1e-6:
            raise DataError('Speaker vector flagged unit-norm has norm {}'.format(np.linalg.norm(self.values)))

    @property
    def dim(self):
        return self.values.shape[0]


@dataclass
class EmotionVector:
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.ndim != 1 or not np.all(np.isfinite(self.values)):
            raise DataError('Emotion vector must be a finite one-dimensional array')

    @property
    def dim(self):
        return self.values.shape[0]


class Backend(ABC):
    """
    Abstract encoder backend producing the three conditioning representations
    """
    name = None

    def __init__(self, dims=TOY_DIMS, sample_rate=DEFAULT_SAMPLE_RATE, hop=DEFAULT_HOP):
        self.dims = dims
        self.sample_rate = sample_rate
        self.hop = hop

    @abstractmethod
    def content(self, waveform):
        pass

    @abstractmethod
    def speaker(self, waveform):
        pass

    @abstractmethod
    def emotion(self, waveform):
        pass

    def check_sample_rate(self, waveform):
        if waveform.sample_rate != self.sample_rate:
            raise SampleRateError('Waveform sampled at {} Hz; the {} backend expects {} Hz'.format(
                waveform.sample_rate, self.name, self.sample_rate))
