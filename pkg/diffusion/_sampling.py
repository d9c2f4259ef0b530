import numpy as np
import torch

from utils import NumericError, ShapeMismatchError
from datasets import Waveform, DEFAULT_SAMPLE_RATE
from ._schedule import posterior_mean


def ancestral_sample(eps_fn, shape, schedule, generator, dtype=torch.float32):
    '''
    Runs the reverse chain from x_T ~ N(0, I) down to x_0; no noise is added at the final step.
    :param eps_fn: callable (x_t, t) -> predicted noise of the same shape
    :param shape: sample shape
    :param schedule: NoiseSchedule
    :param generator: seeded torch.Generator
    :return: x_0 tensor
    '''
    x = torch.randn(shape, generator=generator, dtype=dtype)
    for t in range(schedule.T, 0, -1):
        mean = posterior_mean(x, t, eps_fn(x, t), schedule)
        if t > 1:
            x = mean + schedule.sigma(t) * torch.randn(shape, generator=generator, dtype=dtype)
        else:
            x = mean
    return x


@torch.no_grad()
def reverse_sample(model, c, length, seed, schedule, sample_rate=DEFAULT_SAMPLE_RATE):
    '''
    Generates a waveform from noise under conditioning c.
    :param model: DenoiserModel
    :param c: Conditioning with S rows
    :param length: number of samples, must equal S * hop
    :param seed: sampling seed; the output is a pure function of (model, c, length, seed)
    :param schedule: NoiseSchedule the model was trained with
    :return: Waveform
    '''
    hop = model.config.hop
    if length != c.rows * hop:
        raise ShapeMismatchError('Requested {} samples but the conditioning covers {} segments of {}'.format(
            length, c.rows, hop))
    model.eval()
    generator = torch.Generator().manual_seed(int(seed))
    cond = torch.as_tensor(c.values, dtype=torch.float32).unsqueeze(0)

    def eps_fn(x, t):
        return model(x, torch.full((1,), t, dtype=torch.long), cond)

    x = ancestral_sample(eps_fn, (1, length), schedule, generator)
    samples = x[0].double().numpy()
    if not np.all(np.isfinite(samples)):
        raise NumericError('Reverse sampling produced non-finite samples')
    return Waveform(samples=samples, sample_rate=sample_rate)
