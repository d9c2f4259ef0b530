import unittest

import numpy as np
import torch

from utils import UsageError, ShapeMismatchError
from diffusion import *


class TestMakeSchedule(unittest.TestCase):
    def test_single_step(self):
        schedule = make_schedule(1, 0.5, 0.5)
        np.testing.assert_array_equal(schedule.alphas, [0.5])
        np.testing.assert_array_equal(schedule.alpha_bars, [0.5])
        self.assertEqual(schedule.sigma(1), 0.0)

    def test_two_steps(self):
        schedule = make_schedule(2, 0.1, 0.2)
        np.testing.assert_allclose(schedule.betas, [0.1, 0.2])
        np.testing.assert_allclose(schedule.alpha_bars, [0.9, 0.72])

    def test_default_final_alpha_bar(self):
        schedule = make_schedule()
        betas = [1e-4 + (t - 1) * (0.05 - 1e-4) / 49 for t in range(1, 51)]
        expected = np.prod(np.float64(1) - np.array(betas, dtype=np.longdouble))
        self.assertAlmostEqual(schedule.alpha_bar(50), float(expected), places=12)
        self.assertEqual(schedule.T, DEFAULT_STEPS)

    def test_invariants_on_random_configs(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            T = int(rng.integers(1, 1001))
            beta_start = float(rng.uniform(1e-5, 1e-2))
            beta_end = float(rng.uniform(beta_start, 0.2))
            s = make_schedule(T, beta_start, beta_end)
            self.assertTrue(np.all(np.diff(s.alpha_bars) < 0))
            self.assertTrue(np.all((s.alpha_bars > 0) & (s.alpha_bars < 1)))
            np.testing.assert_array_equal(s.alpha_bars[1:], s.alphas[1:] * s.alpha_bars[:-1])
            self.assertTrue(np.all(s.sigmas ** 2 <= s.betas * (1 + 1e-12)))
            self.assertEqual(s.sigmas[0], 0.0)

    def test_invalid_ranges(self):
        self.assertRaises(UsageError, make_schedule, 0)
        self.assertRaises(UsageError, make_schedule, 10, 0.2, 0.1)
        self.assertRaises(UsageError, make_schedule, 10, 0.0, 0.1)
        self.assertRaises(UsageError, make_schedule, 10, 0.1, 1.0)

    def test_step_range(self):
        schedule = make_schedule(10)
        self.assertRaises(StepRangeError, schedule.beta, 0)
        self.assertRaises(StepRangeError, schedule.alpha_bar, 11)
        self.assertRaises(StepRangeError, forward_sample, np.zeros(3), 11, np.zeros(3), schedule)

    def test_dict_round_trip(self):
        schedule = make_schedule(7, 1e-3, 0.1)
        np.testing.assert_array_equal(NoiseSchedule.from_dict(schedule.to_dict()).alpha_bars, schedule.alpha_bars)


class TestForwardProcess(unittest.TestCase):
    def setUp(self):
        self.schedule = make_schedule()
        self.t = self.schedule.T // 2
        self.alpha_bar = self.schedule.alpha_bar(self.t)
        self.x0 = np.random.default_rng(1).uniform(-1, 1, 64)

    def test_degenerate_inputs(self):
        eps = np.random.default_rng(2).standard_normal(64)
        np.testing.assert_allclose(forward_sample(self.x0, self.t, np.zeros(64), self.schedule),
                                   np.sqrt(self.alpha_bar) * self.x0)
        np.testing.assert_allclose(forward_sample(np.zeros(64), self.t, eps, self.schedule),
                                   np.sqrt(1 - self.alpha_bar) * eps)

    def _check_marginal(self, samples):
        n = samples.shape[0]
        tolerance = 4 * np.sqrt((1 - self.alpha_bar) / n)
        self.assertTrue(np.all(np.abs(samples.mean(axis=0) - np.sqrt(self.alpha_bar) * self.x0) < tolerance))
        self.assertTrue(np.all(np.abs(samples.var(axis=0) / (1 - self.alpha_bar) - 1) < 0.05))

    def test_closed_form_marginal(self):
        eps = np.random.default_rng(3).standard_normal((20000, 64))
        self._check_marginal(forward_sample(np.broadcast_to(self.x0, eps.shape), self.t, eps, self.schedule))

    def test_chain_matches_closed_form(self):
        rng = np.random.default_rng(4)
        x = np.tile(self.x0, (20000, 1))
        for step in range(1, self.t + 1):
            x = corrupt_step(x, step, rng.standard_normal(x.shape), self.schedule)
        self._check_marginal(x)

    def test_per_item_steps(self):
        x0 = torch.ones(3, 5)
        eps = torch.zeros(3, 5)
        t = torch.tensor([1, 10, 50])
        x_t = forward_sample(x0, t, eps, self.schedule)
        for i, step in enumerate((1, 10, 50)):
            self.assertAlmostEqual(x_t[i, 0].item(), np.sqrt(self.schedule.alpha_bar(step)), places=6)

    def test_shape_mismatch(self):
        self.assertRaises(ShapeMismatchError, forward_sample, np.zeros(4), 1, np.zeros(5), self.schedule)


class TestPosterior(unittest.TestCase):
    def setUp(self):
        self.schedule = make_schedule()

    def test_zero_prediction(self):
        x_t = np.linspace(-1, 1, 9)
        np.testing.assert_allclose(posterior_mean(x_t, 10, np.zeros(9), self.schedule),
                                   x_t / np.sqrt(self.schedule.alpha(10)))

    def test_vanishing_beta(self):
        schedule = make_schedule(1, 1e-12, 1e-12)
        x_t = np.linspace(-1, 1, 9)
        eps = np.ones(9)
        np.testing.assert_allclose(posterior_mean(x_t, 1, eps, schedule), x_t, atol=1e-5)

    def test_true_noise_gives_true_posterior(self):
        rng = np.random.default_rng(5)
        x0, eps = rng.standard_normal(32), rng.standard_normal(32)
        for t in (2, 25, 50):
            x_t = forward_sample(x0, t, eps, self.schedule)
            np.testing.assert_allclose(posterior_mean(x_t, t, eps, self.schedule),
                                       true_posterior_mean(x0, x_t, t, self.schedule), atol=1e-10)

    def test_analytic_denoiser(self):
        self.assertEqual(np.abs(analytic_gaussian_denoiser(np.zeros(4), 5, self.schedule)).max(), 0.0)
        nearly_clean = make_schedule(1, 1e-12, 1e-12)
        self.assertLess(np.abs(analytic_gaussian_denoiser(np.ones(4), 1, nearly_clean)).max(), 1e-5)


class TestDiffusionLoss(unittest.TestCase):
    def test_cases(self):
        self.assertEqual(diffusion_loss(np.array([1.0, 0.0]), np.zeros(2)), 1.0)
        eps = np.random.default_rng(0).standard_normal((4, 8))
        self.assertEqual(diffusion_loss(eps, eps), 0.0)
        self.assertRaises(ShapeMismatchError, diffusion_loss, np.zeros(3), np.zeros(4))

    def test_batch_mean(self):
        eps = torch.ones(2, 3)
        self.assertAlmostEqual(diffusion_loss(eps, torch.zeros(2, 3)).item(), 3.0)

    def test_expected_value_is_dimension(self):
        eps = np.random.default_rng(1).standard_normal((20000, 64))
        self.assertAlmostEqual(diffusion_loss(eps, np.zeros_like(eps)) / 64, 1.0, delta=0.02)

    def test_loss_at_analytic_denoiser(self):
        schedule = make_schedule()
        rng = np.random.default_rng(2)
        x0, eps = rng.standard_normal((20000, 32)), rng.standard_normal((20000, 32))
        for t in (5, 25, 50):
            x_t = forward_sample(x0, t, eps, schedule)
            loss = diffusion_loss(eps, analytic_gaussian_denoiser(x_t, t, schedule))
            expected = 32 * schedule.alpha_bar(t)
            self.assertLess(abs(loss / expected - 1), 0.05)
