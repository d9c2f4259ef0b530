from dataclasses import dataclass

import numpy as np
import torch

from utils import UsageError, ShapeMismatchError

DEFAULT_STEPS = 50
DEFAULT_BETA_START = 1e-4
DEFAULT_BETA_END = 0.05


class StepRangeError(UsageError):
    pass


@dataclass(frozen=True)
class NoiseSchedule:
    """
    Tables of a linear-beta diffusion process in float64, indexed by step t = 1..T
    through the accessor methods (array position t - 1).
    """
    T: int
    beta_start: float
    beta_end: float
    betas: np.ndarray
    alphas: np.ndarray
    alpha_bars: np.ndarray
    alpha_bars_prev: np.ndarray
    sigmas: np.ndarray

    def check_step(self, t):
        t_min, t_max = (int(t.min()), int(t.max())) if np.ndim(t) else (int(t), int(t))
        if t_min < 1 or t_max > self.T:
            raise StepRangeError('Diffusion step must lie in [1, {}], got {}'.format(
                self.T, t_min if t_min < 1 else t_max))

    def beta(self, t):
        self.check_step(t)
        return float(self.betas[t - 1])

    def alpha(self, t):
        self.check_step(t)
        return float(self.alphas[t - 1])

    def alpha_bar(self, t):
        self.check_step(t)
        return float(self.alpha_bars[t - 1])

    def sigma(self, t):
        self.check_step(t)
        return float(self.sigmas[t - 1])

    def to_dict(self):
        return {'T': self.T, 'beta_start': self.beta_start, 'beta_end': self.beta_end}

    @classmethod
    def from_dict(cls, d):
        return make_schedule(d['T'], d['beta_start'], d['beta_end'])


def make_schedule(T=DEFAULT_STEPS, beta_start=DEFAULT_BETA_START, beta_end=DEFAULT_BETA_END):
    '''
    Linear beta schedule with the DDPM posterior variances.
    :param T: number of steps, at least 1
    :param beta_start: beta_1
    :param beta_end: beta_T
    :return: NoiseSchedule
    '''
    if int(T) != T or T < 1:
        raise UsageError('T must be a positive integer, got {}'.format(T))
    if not 0 < beta_start <= beta_end < 1:
        raise UsageError('Betas must satisfy 0 < beta_start <= beta_end < 1, got {} and {}'.format(
            beta_start, beta_end))
    T = int(T)
    if T == 1:
        betas = np.array([float(beta_start)])
    else:
        betas = beta_start + np.arange(T) * (beta_end - beta_start) / (T - 1)
    alphas = 1.0 - betas
    alpha_bars = np.cumprod(alphas)
    alpha_bars_prev = np.concatenate([[1.0], alpha_bars[:-1]])
    # sigma_1 is zero because alpha_bar_0 = 1
    variances = betas * (1.0 - alpha_bars_prev) / (1.0 - alpha_bars)
    return NoiseSchedule(T=T, beta_start=float(beta_start), beta_end=float(beta_end), betas=betas, alphas=alphas,
                         alpha_bars=alpha_bars, alpha_bars_prev=alpha_bars_prev, sigmas=np.sqrt(variances))


def _coefficient(table, t, x):
    """Gathers table[t - 1] and shapes it to broadcast against x, for numpy or torch inputs."""
    if torch.is_tensor(x):
        values = torch.as_tensor(table, dtype=x.dtype, device=x.device)
        index = torch.as_tensor(t, device=x.device).long() - 1
        out = values.gather(-1, index.reshape(-1))
        return out.reshape(-1, *((1,) * (x.dim() - 1))) if index.dim() else out.reshape(())
    index = np.asarray(t) - 1
    out = np.asarray(table)[index]
    return out.reshape(-1, *((1,) * (np.ndim(x) - 1))) if index.ndim else out


def _check_shapes(a, b, what):
    if tuple(a.shape) != tuple(b.shape):
        raise ShapeMismatchError('{}: shapes {} and {} differ'.format(what, tuple(a.shape), tuple(b.shape)))


def forward_sample(x0, t, eps, schedule):
    '''
    Closed-form corruption x_t = sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) eps.
    :param x0: clean signal, numpy array or tensor; a per-item t needs a leading batch axis
    :param t: step, scalar or one per batch item
    :param eps: noise of the same shape as x0
    :param schedule: NoiseSchedule
    '''
    schedule.check_step(t)
    _check_shapes(x0, eps, 'forward_sample')
    a = _coefficient(schedule.alpha_bars, t, x0)
    return a ** 0.5 * x0 + (1 - a) ** 0.5 * eps


def corrupt_step(x_prev, t, eps, schedule):
    """Single Markov corruption step x_t = sqrt(alpha_t) x_{t-1} + sqrt(beta_t) eps."""
    schedule.check_step(t)
    _check_shapes(x_prev, eps, 'corrupt_step')
    return _coefficient(schedule.alphas, t, x_prev) ** 0.5 * x_prev + _coefficient(schedule.betas, t, x_prev) ** 0.5 * eps


def posterior_mean(x_t, t, eps_pred, schedule):
    '''
    Reverse-step mean mu = (x_t - beta_t / sqrt(1 - alpha_bar_t) * eps_pred) / sqrt(alpha_t).
    '''
    schedule.check_step(t)
    _check_shapes(x_t, eps_pred, 'posterior_mean')
    beta = _coefficient(schedule.betas, t, x_t)
    alpha = _coefficient(schedule.alphas, t, x_t)
    alpha_bar = _coefficient(schedule.alpha_bars, t, x_t)
    return (x_t - beta / (1 - alpha_bar) ** 0.5 * eps_pred) / alpha ** 0.5


def true_posterior_mean(x0, x_t, t, schedule):
    """Mean of q(x_{t-1} | x_t, x0)."""
    schedule.check_step(t)
    beta = _coefficient(schedule.betas, t, x_t)
    alpha = _coefficient(schedule.alphas, t, x_t)
    alpha_bar = _coefficient(schedule.alpha_bars, t, x_t)
    alpha_bar_prev = _coefficient(schedule.alpha_bars_prev, t, x_t)
    return (beta * alpha_bar_prev ** 0.5 * x0 + (1 - alpha_bar_prev) * alpha ** 0.5 * x_t) / (1 - alpha_bar)


def analytic_gaussian_denoiser(x_t, t, schedule):
    """Bayes-optimal noise prediction for x0 ~ N(0, I): sqrt(1 - alpha_bar_t) * x_t."""
    schedule.check_step(t)
    return (1 - _coefficient(schedule.alpha_bars, t, x_t)) ** 0.5 * x_t


def diffusion_loss(eps, eps_pred):
    '''
    Squared L2 norm of eps - eps_pred summed over elements and averaged over the
    leading batch axis; a one-dimensional input is a single entry.
    :return: tensor for tensor inputs, float otherwise
    '''
    _check_shapes(eps, eps_pred, 'diffusion_loss')
    diff = eps - eps_pred
    if torch.is_tensor(diff):
        if diff.dim() <= 1:
            return (diff ** 2).sum()
        return (diff ** 2).reshape(diff.shape[0], -1).sum(dim=1).mean()
    diff = np.asarray(diff, dtype=np.float64)
    if diff.ndim <= 1:
        return float(np.sum(diff ** 2))
    return float(np.mean(np.sum(diff.reshape(diff.shape[0], -1) ** 2, axis=1)))
