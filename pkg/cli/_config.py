import os
from dataclasses import dataclass, asdict, fields
from typing import Optional, Tuple

from utils import UsageError, read_json
from datasets import TOY_SPLIT_SIZES, FULL_SCALE_SPLIT_SIZES
from encoders import EncoderDims, TOY_DIMS, FULL_SCALE_DIMS, BACKENDS
from diffusion import (make_schedule, decoder_preset, DEFAULT_STEPS, DEFAULT_BETA_START, DEFAULT_BETA_END,
                       DECODER_PRESETS)

PRESETS = {
    'toy': {'content_dim': TOY_DIMS.content, 'speaker_dim': TOY_DIMS.speaker, 'emotion_dim': TOY_DIMS.emotion,
            'T': DEFAULT_STEPS, 'beta_start': DEFAULT_BETA_START, 'beta_end': DEFAULT_BETA_END,
            'split_sizes': TOY_SPLIT_SIZES},
    'paper': {'content_dim': FULL_SCALE_DIMS.content, 'speaker_dim': FULL_SCALE_DIMS.speaker,
              'emotion_dim': FULL_SCALE_DIMS.emotion, 'T': DEFAULT_STEPS, 'beta_start': DEFAULT_BETA_START,
              'beta_end': DEFAULT_BETA_END, 'split_sizes': FULL_SCALE_SPLIT_SIZES},
}
PRESETS['full_scale'] = PRESETS['paper']


@dataclass
class GlobalConfig:
    """
    Settings shared by every subcommand. Fields left unset take the preset's value.
    """
    preset: str = 'toy'
    seed: int = 0
    n_jobs: int = 1
    backend: str = 'oracle'
    corpus: Optional[str] = None
    embeddings: Optional[str] = None
    checkpoint: Optional[str] = None
    reports: Optional[str] = None
    content_dim: Optional[int] = None
    speaker_dim: Optional[int] = None
    emotion_dim: Optional[int] = None
    T: Optional[int] = None
    beta_start: Optional[float] = None
    beta_end: Optional[float] = None
    split_sizes: Optional[Tuple[int, int, int]] = None

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise UsageError('Unknown preset "{}"; choose from {}'.format(self.preset, ', '.join(PRESETS)))
        for key, value in PRESETS[self.preset].items():
            if getattr(self, key) is None:
                setattr(self, key, value)
        self.split_sizes = tuple(self.split_sizes)
        if self.backend not in BACKENDS:
            raise UsageError('Unknown encoder backend "{}"; choose from {}'.format(self.backend, ', '.join(BACKENDS)))
        if self.seed < 0:
            raise UsageError('seed must be non-negative')
        if self.n_jobs == 0:
            raise UsageError('n_jobs must not be 0')
        for key in ('content_dim', 'speaker_dim', 'emotion_dim'):
            if int(getattr(self, key)) <= 0:
                raise UsageError('{} must be positive'.format(key))
        if len(self.split_sizes) != 3:
            raise UsageError('split_sizes needs three counts (train, reference, test)')
        make_schedule(self.T, self.beta_start, self.beta_end)

    @property
    def dims(self):
        return EncoderDims(int(self.content_dim), int(self.speaker_dim), int(self.emotion_dim))

    @property
    def schedule(self):
        return make_schedule(self.T, self.beta_start, self.beta_end)

    def decoder(self, conditioning_dim):
        return decoder_preset(self.preset, conditioning_dim)

    def to_dict(self):
        d = asdict(self)
        d['split_sizes'] = list(self.split_sizes)
        d['decoder'] = dict(DECODER_PRESETS[self.preset])
        return d


CONFIG_KEYS = tuple(f.name for f in fields(GlobalConfig))


def load_config_file(path):
    '''
    Reads a JSON config file. Unknown keys are rejected.
    :param path: JSON file path
    :return: dict of settings
    '''
    if not os.path.isfile(path):
        raise UsageError('Config file not found: {}'.format(path))
    values = read_json(path)
    if not isinstance(values, dict):
        raise UsageError('Config file {} must hold a JSON object'.format(path))
    unknown = sorted(set(values) - set(CONFIG_KEYS))
    if unknown:
        raise UsageError('Unknown config keys in {}: {}'.format(path, ', '.join(unknown)))
    return values


def resolve_config(path=None, overrides=None):
    '''
    Builds the effective configuration: command-line flag > config file > preset default.
    :param path: optional JSON config file
    :param overrides: dict of command-line values; None entries are ignored
    :return: GlobalConfig
    '''
    values = load_config_file(path) if path is not None else {}
    for key, value in (overrides or {}).items():
        if key not in CONFIG_KEYS:
            raise UsageError('Unknown config key: {}'.format(key))
        if value is not None:
            values[key] = value
    try:
        return GlobalConfig(**values)
    except TypeError as e:
        raise UsageError('Invalid configuration: {}'.format(e)) from e
