from dataclasses import dataclass, asdict
from typing import Optional, Tuple

from utils import UsageError
from diffusion import DEFAULT_STEPS, DEFAULT_BETA_START, DEFAULT_BETA_END, LAYOUTS, FULL, DECODER_PRESETS

EMOTION_SOURCES = ('source', 'reference')


@dataclass
class TrainConfig:
    manifest: str
    store: str
    out_dir: str
    steps: int = 2000
    batch_size: int = 16
    learning_rate: float = 2e-4
    crop_segments: int = 16
    seed: int = 0
    checkpoint_interval: int = 500
    backend: str = 'oracle'
    preset: str = 'toy'
    layout: str = FULL
    T: int = DEFAULT_STEPS
    beta_start: float = DEFAULT_BETA_START
    beta_end: float = DEFAULT_BETA_END
    grad_clip: float = 1.0
    max_batch_samples: int = 2 ** 22
    utterance_ids: Optional[Tuple[str, ...]] = None
    resume: Optional[str] = None

    def __post_init__(self):
        if self.steps < 0:
            raise UsageError('steps must be non-negative')
        for key in ('batch_size', 'crop_segments', 'checkpoint_interval', 'max_batch_samples'):
            if getattr(self, key) <= 0:
                raise UsageError('{} must be positive'.format(key))
        if self.learning_rate <= 0 or self.grad_clip <= 0:
            raise UsageError('learning_rate and grad_clip must be positive')
        if self.seed < 0:
            raise UsageError('seed must be non-negative')
        if self.preset not in DECODER_PRESETS:
            raise UsageError('Unknown preset "{}"'.format(self.preset))
        if self.layout not in LAYOUTS:
            raise UsageError('Unknown conditioning layout "{}"'.format(self.layout))
        if self.utterance_ids is not None:
            self.utterance_ids = tuple(self.utterance_ids)

    def check_budget(self, hop):
        samples = self.batch_size * self.crop_segments * hop
        if samples > self.max_batch_samples:
            raise UsageError('A batch of {} x {} segments ({} samples) exceeds the budget of {} samples'.format(
                self.batch_size, self.crop_segments, samples, self.max_batch_samples))

    def to_dict(self):
        d = asdict(self)
        if d['utterance_ids'] is not None:
            d['utterance_ids'] = list(d['utterance_ids'])
        return d


@dataclass
class ConversionRequest:
    source: str
    reference: str
    checkpoint: str
    output: str
    emotion_source: str = 'source'
    seed: int = 0
    backend: str = 'oracle'
    manifest: Optional[str] = None
    store: Optional[str] = None
    extra_references: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.emotion_source not in EMOTION_SOURCES:
            raise UsageError('emotion_source must be one of {}, got "{}"'.format(
                ', '.join(EMOTION_SOURCES), self.emotion_source))
        if self.seed < 0:
            raise UsageError('seed must be non-negative')
        self.extra_references = tuple(self.extra_references)
