from dataclasses import dataclass, asdict
from math import sqrt

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from utils import UsageError, ShapeMismatchError
from datasets import DEFAULT_HOP


@dataclass(frozen=True)
class DecoderConfig:
    n_residual_blocks: int = 8
    residual_channels: int = 32
    dilation_cycle_length: int = 8
    step_embed_dim: int = 64
    step_hidden_dim: int = 256
    conditioning_dim: int = 28
    hop: int = DEFAULT_HOP

    def __post_init__(self):
        for key, value in asdict(self).items():
            if int(value) != value or value <= 0:
                raise UsageError('DecoderConfig.{} must be a positive integer, got {}'.format(key, value))
        if self.step_embed_dim % 2:
            raise UsageError('step_embed_dim must be even')

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


DECODER_PRESETS = {
    'toy': dict(n_residual_blocks=8, residual_channels=32, dilation_cycle_length=8, step_embed_dim=64,
                step_hidden_dim=256),
    'paper': dict(n_residual_blocks=64, residual_channels=128, dilation_cycle_length=8, step_embed_dim=128,
                  step_hidden_dim=512),
}
# alias
DECODER_PRESETS['full_scale'] = DECODER_PRESETS['paper']


def decoder_preset(name, conditioning_dim, hop=DEFAULT_HOP):
    if name not in DECODER_PRESETS:
        raise UsageError('Unknown decoder preset "{}"; choose from {}'.format(name, ', '.join(DECODER_PRESETS)))
    return DecoderConfig(conditioning_dim=conditioning_dim, hop=hop, **DECODER_PRESETS[name])


def step_embedding(t, dim):
    '''
    Sinusoidal step code: pair k holds sin and cos of t * 10^(4k / (dim/2 - 1)),
    sines at even positions, cosines at odd ones.
    :param t: step, scalar or 1-D tensor
    :param dim: even embedding size
    :return: tensor of shape (dim,) or (len(t), dim)
    '''
    if dim <= 0 or dim % 2:
        raise UsageError('Step embedding dimension must be a positive even number, got {}'.format(dim))
    scalar = not torch.is_tensor(t) and np.ndim(t) == 0
    t = torch.as_tensor(t, dtype=torch.float64).reshape(-1, 1)
    half = dim // 2
    k = torch.arange(half, dtype=torch.float64)
    ladder = 10.0 ** (4.0 * k / (half - 1)) if half > 1 else torch.ones(1, dtype=torch.float64)
    table = t * ladder[None, :]
    emb = torch.stack([torch.sin(table), torch.cos(table)], dim=-1).reshape(-1, dim).float()
    return emb[0] if scalar else emb


def swish(x):
    return x * torch.sigmoid(x)


def _conv1x1(in_channels, out_channels):
    layer = nn.Conv1d(in_channels, out_channels, 1)
    nn.init.kaiming_normal_(layer.weight)
    return layer


class StepEncoder(nn.Module):
    def __init__(self, embed_dim, hidden_dim):
        super().__init__()
        self.embed_dim = embed_dim
        self.fc1 = nn.Linear(embed_dim, hidden_dim)
        self.fc2 = nn.Linear(hidden_dim, hidden_dim)

    def forward(self, t):
        x = step_embedding(t, self.embed_dim).to(self.fc1.weight.device)
        return swish(self.fc2(swish(self.fc1(x))))


class ResidualBlock(nn.Module):
    """
    Gated dilated convolution receiving the step code additively and the
    conditioning inside the gate, projected at segment rate then repeated per sample.
    """
    def __init__(self, channels, dilation, step_dim, conditioning_dim, hop):
        super().__init__()
        self.hop = hop
        self.dilated_conv = nn.Conv1d(channels, 2 * channels, 3, padding=dilation, dilation=dilation)
        nn.init.kaiming_normal_(self.dilated_conv.weight)
        self.step_projection = nn.Linear(step_dim, channels)
        self.conditioning_projection = _conv1x1(conditioning_dim, 2 * channels)
        self.output_projection = _conv1x1(channels, 2 * channels)

    def forward(self, x, step, conditioning):
        y = x + self.step_projection(step).unsqueeze(-1)
        c = self.conditioning_projection(conditioning).repeat_interleave(self.hop, dim=-1)
        y = self.dilated_conv(y) + c
        gate, filt = torch.chunk(y, 2, dim=1)
        y = self.output_projection(torch.sigmoid(gate) * torch.tanh(filt))
        residual, skip = torch.chunk(y, 2, dim=1)
        return (x + residual) / sqrt(2.0), skip


class DenoiserModel(nn.Module):
    """
    Noise predictor eps_theta(x_t, t, c) over raw waveform samples.
    """
    def __init__(self, config):
        super().__init__()
        self.config = config
        channels = config.residual_channels
        self.prenet = _conv1x1(1, channels)
        self.step_encoder = StepEncoder(config.step_embed_dim, config.step_hidden_dim)
        self.residual_layers = nn.ModuleList([
            ResidualBlock(channels, 2 ** (i % config.dilation_cycle_length), config.step_hidden_dim,
                          config.conditioning_dim, config.hop)
            for i in range(config.n_residual_blocks)
        ])
        self.skip_projection = _conv1x1(channels, channels)
        self.output_projection = nn.Conv1d(channels, 1, 1)
        nn.init.zeros_(self.output_projection.weight)
        nn.init.zeros_(self.output_projection.bias)

    def forward(self, x_t, t, conditioning):
        '''
        :param x_t: (B, S * hop) noisy samples
        :param t: (B,) steps
        :param conditioning: (B, S, conditioning_dim)
        :return: (B, S * hop) predicted noise
        '''
        if x_t.dim() != 2 or conditioning.dim() != 3:
            raise ShapeMismatchError('Expected x_t of shape (B, L) and conditioning of shape (B, S, C)')
        if conditioning.shape[-1] != self.config.conditioning_dim:
            raise ShapeMismatchError('Conditioning width {} does not match the decoder ({})'.format(
                conditioning.shape[-1], self.config.conditioning_dim))
        if x_t.shape[0] != conditioning.shape[0] or x_t.shape[1] != conditioning.shape[1] * self.config.hop:
            raise ShapeMismatchError('x_t of length {} needs {} conditioning rows, got {}'.format(
                x_t.shape[1], x_t.shape[1] / self.config.hop, conditioning.shape[1]))
        x = F.relu(self.prenet(x_t.unsqueeze(1)))
        step = self.step_encoder(t)
        c = conditioning.transpose(1, 2)
        skip = None
        for layer in self.residual_layers:
            x, skip_connection = layer(x, step, c)
            skip = skip_connection if skip is None else skip + skip_connection
        x = skip / sqrt(len(self.residual_layers))
        x = F.relu(self.skip_projection(x))
        return self.output_projection(x).squeeze(1)


def denoiser_forward(model, x_t, t, c):
    '''
    Single-utterance convenience call.
    :param model: DenoiserModel
    :param x_t: 1-D tensor or array of S * hop samples
    :param t: step
    :param c: Conditioning with S rows
    :return: 1-D tensor of predicted noise
    '''
    x = torch.as_tensor(np.asarray(x_t, dtype=np.float32)) if not torch.is_tensor(x_t) else x_t.float()
    cond = torch.as_tensor(np.asarray(getattr(c, 'values', c), dtype=np.float32))
    if x.dim() != 1:
        raise ShapeMismatchError('denoiser_forward expects a single waveform segment')
    steps = torch.full((1,), int(t), dtype=torch.long)
    return model(x.unsqueeze(0), steps, cond.unsqueeze(0))[0]
