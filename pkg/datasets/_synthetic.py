"""
Additive-harmonic expressive speech generator.

Every utterance is a sum of harmonics of a time-varying F0 shaped by two
formant resonances. Content tokens pick the formant pair, the speaker sets the
base F0, formant scale and spectral tilt, and the emotion sets an F0 shift,
vibrato, energy contour and declination. Each (speaker, emotion) cell adds its
own small offset on top of the shared emotion factors.
"""
from dataclasses import dataclass, field, asdict
from typing import Tuple

import numpy as np

from utils import DataError, make_rng
from ._waveform import Waveform, DEFAULT_SAMPLE_RATE, DEFAULT_HOP

EMOTIONS = ('neutral', 'angry', 'happy', 'sad')

PAUSE_TOKEN = 0

# (F1, F2) in Hz; row 0 is the pause token and is never voiced
VOWEL_FORMANTS = np.array([
    [500.0, 1500.0],
    [730.0, 1090.0],
    [270.0, 2290.0],
    [300.0, 870.0],
    [530.0, 1840.0],
    [570.0, 840.0],
    [440.0, 1020.0],
    [660.0, 1720.0],
])

# f0 shift (semitones), vibrato depth (semitones), vibrato rate (Hz),
# tremolo depth, tremolo rate (Hz), gain, declination (semitones over the utterance)
_SHARED_EMOTION_FACTORS = {
    'neutral': (0.0, 0.15, 4.5, 0.05, 3.0, 1.0, -1.0),
    'angry': (1.5, 0.5, 6.0, 0.35, 7.0, 1.6, -2.0),
    'happy': (2.5, 1.0, 5.0, 0.2, 4.0, 1.3, 0.5),
    'sad': (-1.5, 0.25, 3.5, 0.1, 2.0, 0.6, -2.5),
}


class UnknownLabelError(DataError):
    pass


@dataclass(frozen=True)
class GeneratorParams:
    master_seed: int = 0
    sample_rate: int = DEFAULT_SAMPLE_RATE
    hop: int = DEFAULT_HOP
    hops_per_token: int = 4
    vocab_size: int = 8
    min_tokens: int = 6
    max_tokens: int = 10
    n_speakers: int = 8
    emotions: Tuple[str, ...] = EMOTIONS
    f0_range: Tuple[float, float] = (90.0, 250.0)
    formant_scale_range: Tuple[float, float] = (0.85, 1.2)
    max_harmonic_hz: float = 7000.0
    noise_level: float = 0.002
    speaker_offset_scale: float = 0.25

    def __post_init__(self):
        if not 2 <= self.vocab_size <= len(VOWEL_FORMANTS):
            raise ValueError('vocab_size must lie in [2, {}]'.format(len(VOWEL_FORMANTS)))
        if self.n_speakers < 2:
            raise ValueError('At least two synthetic speakers are required')
        if not 1 <= self.min_tokens <= self.max_tokens:
            raise ValueError('Token count range must satisfy 1 <= min_tokens <= max_tokens')
        unknown = [e for e in self.emotions if e not in _SHARED_EMOTION_FACTORS]
        if unknown:
            raise ValueError('Unknown emotions: {}'.format(unknown))
        if self.max_harmonic_hz >= self.sample_rate / 2:
            raise ValueError('max_harmonic_hz must stay below the Nyquist frequency')

    @property
    def speakers(self):
        return tuple('spk{:02d}'.format(i) for i in range(self.n_speakers))

    def to_dict(self):
        d = asdict(self)
        d['emotions'] = list(self.emotions)
        d['f0_range'] = list(self.f0_range)
        d['formant_scale_range'] = list(self.formant_scale_range)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        for key in ('emotions', 'f0_range', 'formant_scale_range'):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


@dataclass(frozen=True)
class SynthUtteranceSpec:
    speaker_id: str
    emotion_id: str
    content_tokens: Tuple[int, ...]
    seed: int

    def __post_init__(self):
        if len(self.content_tokens) == 0:
            raise ValueError('content_tokens must not be empty')
        if self.seed < 0:
            raise ValueError('seed must be unsigned')


@dataclass
class UtteranceLabels:
    """Ground truth of a generated utterance; f0 and voicing are given per hop."""
    speaker_id: str
    emotion_id: str
    content_tokens: Tuple[int, ...]
    f0: np.ndarray = field(default=None, repr=False)
    voiced: np.ndarray = field(default=None, repr=False)


@dataclass(frozen=True)
class SpeakerFactors:
    base_f0: float
    formant_scale: float
    tilt: float

    def as_vector(self):
        return np.array([self.base_f0, self.formant_scale, self.tilt])


@dataclass(frozen=True)
class EmotionFactors:
    f0_shift: float
    vibrato_depth: float
    vibrato_rate: float
    tremolo_depth: float
    tremolo_rate: float
    gain: float
    declination: float

    def as_vector(self):
        return np.array([self.f0_shift, self.vibrato_depth, self.vibrato_rate, self.tremolo_depth,
                         self.tremolo_rate, self.gain, self.declination])


@dataclass(frozen=True)
class CellOffsets:
    f0_shift: float
    vibrato_scale: float
    tremolo_delta: float
    declination: float


class FactorTable:
    """
    Speaker, emotion and (speaker, emotion) factors, all derived from the master seed.
    """
    def __init__(self, params):
        self.params = params
        n = params.n_speakers
        rng = make_rng(params.master_seed, 'speaker-factors')
        base_f0 = np.geomspace(params.f0_range[0], params.f0_range[1], n)[rng.permutation(n)]
        formant_scale = np.linspace(params.formant_scale_range[0], params.formant_scale_range[1], n)[rng.permutation(n)]
        tilt = rng.uniform(0.6, 1.4, size=n)
        self._speakers = {s: SpeakerFactors(float(base_f0[i]), float(formant_scale[i]), float(tilt[i]))
                          for i, s in enumerate(params.speakers)}
        self._emotions = {e: EmotionFactors(*_SHARED_EMOTION_FACTORS[e]) for e in params.emotions}
        self._cells = {}
        for s in params.speakers:
            for e in params.emotions:
                cell_rng = make_rng(params.master_seed, 'cell-offsets', s, e)
                self._cells[(s, e)] = CellOffsets(f0_shift=float(cell_rng.uniform(-0.4, 0.4)),
                                                  vibrato_scale=float(cell_rng.uniform(0.8, 1.25)),
                                                  tremolo_delta=float(cell_rng.uniform(-0.05, 0.05)),
                                                  declination=float(cell_rng.uniform(-0.5, 0.5)))

    def speaker(self, speaker_id):
        try:
            return self._speakers[speaker_id]
        except KeyError:
            raise UnknownLabelError('Unknown speaker id: {}'.format(speaker_id)) from None

    def emotion(self, emotion_id):
        try:
            return self._emotions[emotion_id]
        except KeyError:
            raise UnknownLabelError('Unknown emotion id: {}'.format(emotion_id)) from None

    def cell(self, speaker_id, emotion_id):
        self.speaker(speaker_id)
        self.emotion(emotion_id)
        return self._cells[(speaker_id, emotion_id)]


def make_content_tokens(rng, params):
    """
    Draws a token sequence; the first token is always voiced.
    :param rng: numpy Generator
    :param params: GeneratorParams
    :return: tuple of ints in [0, vocab_size)
    """
    length = int(rng.integers(params.min_tokens, params.max_tokens + 1))
    tokens = rng.integers(1, params.vocab_size, size=length)
    pauses = rng.random(length) < 0.15
    pauses[0] = False
    tokens[pauses] = PAUSE_TOKEN
    return tuple(int(x) for x in tokens)


def _spectral_envelope(freqs, f1, f2, tilt):
    r1 = 1.0 / (1.0 + ((freqs - f1) / (60.0 + 0.1 * f1)) ** 2)
    r2 = 1.0 / (1.0 + ((freqs - f2) / (80.0 + 0.1 * f2)) ** 2)
    return (freqs / 100.0) ** (-tilt) * (r1 + 0.7 * r2 + 0.02)


def _smooth(x, width):
    kernel = np.ones(width) / width
    return np.convolve(x, kernel, mode='same')


def generate_utterance(spec, params, factors=None):
    '''
    Synthesizes one utterance.
    :param spec: SynthUtteranceSpec
    :param params: GeneratorParams
    :param factors: optional prebuilt FactorTable for params
    :return: (Waveform, UtteranceLabels)
    '''
    factors = factors if factors is not None else FactorTable(params)
    speaker = factors.speaker(spec.speaker_id)
    emotion = factors.emotion(spec.emotion_id)
    cell = factors.cell(spec.speaker_id, spec.emotion_id)
    tokens = np.asarray(spec.content_tokens, dtype=np.int64)
    if tokens.min() < 0 or tokens.max() >= params.vocab_size:
        raise ValueError('content tokens must lie in [0, {})'.format(params.vocab_size))

    rng = np.random.default_rng(spec.seed)
    sr = params.sample_rate
    span = params.hops_per_token * params.hop
    n = len(tokens) * span
    t = np.arange(n) / sr
    progress = np.arange(n) / max(n - 1, 1)

    depth = emotion.vibrato_depth * cell.vibrato_scale
    semitones = (emotion.f0_shift + cell.f0_shift
                 + depth * np.sin(2 * np.pi * emotion.vibrato_rate * t + rng.uniform(0, 2 * np.pi))
                 + (emotion.declination + cell.declination) * (progress - 0.5))
    f0 = speaker.base_f0 * 2.0 ** (semitones / 12.0)
    phase = 2 * np.pi * np.cumsum(f0) / sr + rng.uniform(0, 2 * np.pi)

    # formant targets sit at token centres; pauses keep the previous vowel
    voiced_tokens = tokens.copy()
    for i in range(1, len(voiced_tokens)):
        if voiced_tokens[i] == PAUSE_TOKEN:
            voiced_tokens[i] = voiced_tokens[i - 1]
    formants = VOWEL_FORMANTS[voiced_tokens] * speaker.formant_scale
    centres = (np.arange(len(tokens)) + 0.5) * span
    f1 = np.interp(np.arange(n), centres, formants[:, 0])
    f2 = np.interp(np.arange(n), centres, formants[:, 1])

    n_harmonics = int(params.max_harmonic_hz // f0.min())
    k = np.arange(1, n_harmonics + 1)[:, None]
    freqs = k * f0[None, :]
    envelope = _spectral_envelope(freqs, f1[None, :], f2[None, :], speaker.tilt)
    envelope *= freqs < params.max_harmonic_hz
    voiced_signal = np.sum(envelope * np.sin(k * phase[None, :]), axis=0)

    mask = np.repeat((tokens != PAUSE_TOKEN).astype(np.float64), span)
    mask = _smooth(mask, params.hop // 2)
    active = mask > 0.5
    if active.any():
        voiced_signal /= np.sqrt(np.mean(voiced_signal[active] ** 2))

    tremolo = emotion.tremolo_depth + cell.tremolo_delta
    gain = emotion.gain * (1.0 + tremolo * np.sin(2 * np.pi * emotion.tremolo_rate * t + rng.uniform(0, 2 * np.pi)))
    ramp = np.minimum(1.0, np.minimum(np.arange(n), np.arange(n)[::-1]) / (params.hop // 2))
    samples = 0.08 * gain * ramp * mask * voiced_signal + params.noise_level * rng.standard_normal(n)
    peak = np.max(np.abs(samples))
    if peak > 0.95:
        samples *= 0.95 / peak

    per_hop_f0 = f0.reshape(-1, params.hop).mean(axis=1)
    per_hop_voiced = mask.reshape(-1, params.hop).mean(axis=1) > 0.5
    labels = UtteranceLabels(speaker_id=spec.speaker_id, emotion_id=spec.emotion_id,
                             content_tokens=tuple(int(x) for x in tokens),
                             f0=np.where(per_hop_voiced, per_hop_f0, 0.0), voiced=per_hop_voiced)
    return Waveform(samples=samples, sample_rate=sr, labels=labels), labels
