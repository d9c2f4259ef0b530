"""
Checkpoint files.

    <name>.pt     torch payload: model state_dict, optimizer state_dict, step
    <name>.json   sidecar: format_version, decoder, schedule, encoder_dims, hop, sample_rate,
                  layout, speakers (one-hot layout only), step

The sidecar alone is enough to rebuild the model, so no config file is needed at load time.
"""
import os
from dataclasses import dataclass, field, asdict
from typing import Optional, Tuple

import torch

from utils import DataError, read_json, write_json
from datasets import DEFAULT_SAMPLE_RATE
from encoders import EncoderDims
from ._model import DecoderConfig, DenoiserModel
from ._schedule import NoiseSchedule
from ._conditioning import FULL, conditioning_blocks

CHECKPOINT_FORMAT_VERSION = 1


@dataclass
class Checkpoint:
    model: DenoiserModel
    schedule: NoiseSchedule
    encoder_dims: object
    layout: str = FULL
    speakers: Tuple[str, ...] = ()
    step: int = 0
    sample_rate: int = DEFAULT_SAMPLE_RATE
    optimizer_state: Optional[dict] = field(default=None, repr=False)

    @property
    def config(self):
        return self.model.config

    @property
    def hop(self):
        return self.model.config.hop

    def check_dims(self, dims):
        if dims != self.encoder_dims:
            raise DataError('Checkpoint was trained on encoder dims {} but the embeddings have {}'.format(
                self.encoder_dims, dims))


def sidecar_path(path):
    return os.path.splitext(path)[0] + '.json'


def save_checkpoint(checkpoint, path):
    '''
    :param checkpoint: Checkpoint
    :param path: payload file path (.pt); the sidecar is written next to it
    '''
    payload = {'model': checkpoint.model.state_dict(), 'optimizer': checkpoint.optimizer_state,
               'step': checkpoint.step}
    try:
        torch.save(payload, path)
    except OSError as e:
        raise DataError('Cannot write checkpoint {}: {}'.format(path, e)) from e
    write_json({'format_version': CHECKPOINT_FORMAT_VERSION,
                'decoder': checkpoint.config.to_dict(),
                'schedule': checkpoint.schedule.to_dict(),
                'encoder_dims': asdict(checkpoint.encoder_dims),
                'hop': checkpoint.hop,
                'sample_rate': checkpoint.sample_rate,
                'layout': checkpoint.layout,
                'speakers': list(checkpoint.speakers),
                'step': checkpoint.step}, sidecar_path(path))
    return path


def load_checkpoint(path):
    '''
    Rebuilds model and schedule from the sidecar, then restores the payload.
    :param path: payload file path
    :return: Checkpoint
    '''
    if not os.path.isfile(path):
        raise DataError('Checkpoint not found: {}'.format(path))
    sidecar = read_json(sidecar_path(path))
    if sidecar.get('format_version') != CHECKPOINT_FORMAT_VERSION:
        raise DataError('Unsupported checkpoint format version {}'.format(sidecar.get('format_version')))
    try:
        config = DecoderConfig.from_dict(sidecar['decoder'])
        schedule = NoiseSchedule.from_dict(sidecar['schedule'])
        dims = EncoderDims(**sidecar['encoder_dims'])
        layout = sidecar['layout']
    except (KeyError, TypeError) as e:
        raise DataError('Malformed checkpoint sidecar {}: {}'.format(sidecar_path(path), e)) from e
    speakers = tuple(sidecar.get('speakers', ()))
    width = sum(w for _, w in conditioning_blocks(dims, layout, len(speakers)))
    if width != config.conditioning_dim:
        raise DataError('Checkpoint decoder expects conditioning width {}, its layout gives {}'.format(
            config.conditioning_dim, width))
    try:
        payload = torch.load(path, map_location='cpu', weights_only=True)
    except (RuntimeError, OSError, EOFError) as e:
        raise DataError('Cannot read checkpoint payload {}: {}'.format(path, e)) from e
    model = DenoiserModel(config)
    model.load_state_dict(payload['model'])
    return Checkpoint(model=model, schedule=schedule, encoder_dims=dims, layout=layout, speakers=speakers,
                      step=int(payload.get('step', sidecar.get('step', 0))),
                      sample_rate=sidecar.get('sample_rate', DEFAULT_SAMPLE_RATE),
                      optimizer_state=payload.get('optimizer'))
