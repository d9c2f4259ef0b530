from dataclasses import dataclass

import librosa
import numpy as np

from utils import DataError
from datasets import DEFAULT_SAMPLE_RATE

ANALYSIS_HOP = 160
ANALYSIS_WINDOW = 512
F0_MIN = 50.0
F0_MAX = 600.0
VOICING_THRESHOLD = 0.3
ENERGY_FLOOR = 0.005


@dataclass
class F0Track:
    """F0 in Hz per 10 ms frame, 0 where unvoiced."""
    f0: np.ndarray
    voiced: np.ndarray
    hop: int = ANALYSIS_HOP
    sample_rate: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        self.f0 = np.asarray(self.f0, dtype=np.float64)
        self.voiced = np.asarray(self.voiced, dtype=bool)
        if self.f0.shape != self.voiced.shape or self.f0.ndim != 1:
            raise DataError('f0 and voiced arrays must be one-dimensional and of equal length')
        if np.any((self.f0 > 0) != self.voiced):
            raise DataError('f0 must be positive exactly on voiced frames')

    def __len__(self):
        return self.f0.shape[0]


def frame_signal(waveform, window=ANALYSIS_WINDOW, hop=ANALYSIS_HOP):
    '''
    Slices a waveform into overlapping frames. A waveform shorter than one window
    is zero-padded to a single frame.
    :param waveform: Waveform instance
    :return: array of shape (floor((max(len, window) - window) / hop) + 1, window)
    '''
    if len(waveform) == 0:
        raise DataError('Cannot analyse an empty waveform')
    samples = np.ascontiguousarray(waveform.samples)
    if len(samples) < window:
        samples = np.pad(samples, (0, window - len(samples)))
    frames = librosa.util.frame(samples, frame_length=window, hop_length=hop, axis=0)
    return np.array(frames)


def _normalized_autocorrelation(frames, lags):
    width = frames.shape[1]
    r = np.empty((frames.shape[0], len(lags)))
    for j, lag in enumerate(lags):
        a = frames[:, :width - lag]
        b = frames[:, lag:]
        den = np.sqrt(np.sum(a * a, axis=1) * np.sum(b * b, axis=1))
        r[:, j] = np.sum(a * b, axis=1) / np.maximum(den, 1e-20)
    return r


def extract_f0(waveform, f0_min=F0_MIN, f0_max=F0_MAX, voicing_threshold=VOICING_THRESHOLD,
               energy_floor=ENERGY_FLOOR):
    '''
    Normalized-autocorrelation pitch tracker, one estimate per 10 ms frame over a 32 ms window.
    The shortest lag whose local peak reaches 95% of the frame's best correlation wins,
    which keeps the tracker off sub-octaves.
    :param waveform: Waveform at 16 kHz
    :return: F0Track
    '''
    if waveform.sample_rate != DEFAULT_SAMPLE_RATE:
        raise DataError('Pitch extraction expects {} Hz audio, got {} Hz'.format(
            DEFAULT_SAMPLE_RATE, waveform.sample_rate))
    sr = waveform.sample_rate
    frames = frame_signal(waveform)
    rms = np.sqrt(np.mean(frames ** 2, axis=1))
    frames = frames - frames.mean(axis=1, keepdims=True)

    lags = np.arange(int(np.ceil(sr / f0_max)), int(np.floor(sr / f0_min)) + 1)
    r = _normalized_autocorrelation(frames, lags)

    best = r.max(axis=1)
    is_peak = np.zeros_like(r, dtype=bool)
    is_peak[:, 1:-1] = (r[:, 1:-1] > r[:, :-2]) & (r[:, 1:-1] >= r[:, 2:])
    good = is_peak & (r >= 0.95 * best[:, None])
    idx = np.where(good.any(axis=1), np.argmax(good, axis=1), np.argmax(r, axis=1))

    rows = np.arange(r.shape[0])
    inner = np.clip(idx, 1, len(lags) - 2)
    y0, y1, y2 = r[rows, inner - 1], r[rows, inner], r[rows, inner + 1]
    curvature = y0 - 2 * y1 + y2
    delta = np.where(np.abs(curvature) > 1e-12, 0.5 * (y0 - y2) / np.where(curvature == 0, 1, curvature), 0.0)
    delta = np.where(idx == inner, np.clip(delta, -0.5, 0.5), 0.0)
    f0 = sr / (lags[idx] + delta)

    peak = r[rows, idx]
    voiced = (peak >= voicing_threshold) & (rms >= energy_floor) & (f0 >= f0_min) & (f0 <= f0_max)
    return F0Track(f0=np.where(voiced, f0, 0.0), voiced=voiced, sample_rate=sr)
