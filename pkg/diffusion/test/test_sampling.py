import unittest

import numpy as np
import torch
import torch.nn as nn

from utils import ShapeMismatchError
from diffusion import *


class TestAncestralSample(unittest.TestCase):
    def test_analytic_chain_reaches_standard_normal(self):
        schedule = make_schedule()
        generator = torch.Generator().manual_seed(0)
        x = ancestral_sample(lambda x_t, t: analytic_gaussian_denoiser(x_t, t, schedule), (20000, 32), schedule,
                             generator, dtype=torch.float64).numpy()
        self.assertTrue(np.all(np.abs(x.mean(axis=0)) < 0.05))
        self.assertLess(abs(x.var(axis=0).mean() - 1.0), 0.1)

    def test_single_step_adds_no_noise(self):
        schedule = make_schedule(1, 0.5, 0.5)
        x = ancestral_sample(lambda x_t, t: torch.zeros_like(x_t), (4,), schedule,
                             torch.Generator().manual_seed(1), dtype=torch.float64)
        start = torch.randn((4,), generator=torch.Generator().manual_seed(1), dtype=torch.float64)
        self.assertTrue(torch.allclose(x, start / np.sqrt(0.5)))

    def test_seeded(self):
        schedule = make_schedule(5)
        runs = [ancestral_sample(lambda x_t, t: torch.zeros_like(x_t), (3, 4), schedule,
                                 torch.Generator().manual_seed(seed)) for seed in (2, 2, 3)]
        self.assertTrue(torch.equal(runs[0], runs[1]))
        self.assertFalse(torch.equal(runs[0], runs[2]))


class TestReverseSample(unittest.TestCase):
    def setUp(self):
        torch.manual_seed(0)
        config = DecoderConfig(n_residual_blocks=2, residual_channels=8, dilation_cycle_length=2, step_embed_dim=8,
                               step_hidden_dim=16, conditioning_dim=5, hop=320)
        self.model = DenoiserModel(config)
        nn.init.normal_(self.model.output_projection.weight, std=0.01)
        self.c = assemble_conditioning(np.zeros((3, 2)), np.ones(2), np.ones(1))
        self.schedule = make_schedule(4)

    def test_length_and_rate(self):
        out = reverse_sample(self.model, self.c, 960, 11, self.schedule)
        self.assertEqual(out.samples.shape, (960,))
        self.assertEqual(out.sample_rate, 16000)

    def test_same_seed_same_waveform(self):
        first = reverse_sample(self.model, self.c, 960, 11, self.schedule)
        second = reverse_sample(self.model, self.c, 960, 11, self.schedule)
        other = reverse_sample(self.model, self.c, 960, 12, self.schedule)
        np.testing.assert_array_equal(first.samples, second.samples)
        self.assertFalse(np.array_equal(first.samples, other.samples))

    def test_length_mismatch(self):
        self.assertRaises(ShapeMismatchError, reverse_sample, self.model, self.c, 1000, 0, self.schedule)
