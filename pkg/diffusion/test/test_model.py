import unittest

import numpy as np
import torch
import torch.nn as nn

from utils import ShapeMismatchError, UsageError
from diffusion import *

SMALL = DecoderConfig(n_residual_blocks=2, residual_channels=8, dilation_cycle_length=2, step_embed_dim=8,
                      step_hidden_dim=16, conditioning_dim=5, hop=320)


def _conditioning(rows):
    content = np.random.default_rng(rows).standard_normal((rows, 2))
    return assemble_conditioning(content, np.array([0.5, -0.5]), np.array([1.0]))


def _perturbed_model(seed=0):
    torch.manual_seed(seed)
    model = DenoiserModel(SMALL)
    nn.init.normal_(model.output_projection.weight, std=0.1)
    return model


class TestStepEmbedding(unittest.TestCase):
    def test_zero_step(self):
        emb = step_embedding(0, 8)
        self.assertEqual(tuple(emb.shape), (8,))
        np.testing.assert_array_equal(emb[0::2].numpy(), np.zeros(4))
        np.testing.assert_array_equal(emb[1::2].numpy(), np.ones(4))

    def test_distinct_steps(self):
        emb = step_embedding(torch.arange(1, 51), 64).numpy()
        self.assertEqual(emb.shape, (50, 64))
        self.assertEqual(len({row.tobytes() for row in emb}), 50)

    def test_odd_dimension(self):
        self.assertRaises(UsageError, step_embedding, 3, 7)


class TestDecoderConfig(unittest.TestCase):
    def test_presets(self):
        config = decoder_preset('paper', 640)
        self.assertEqual(config.n_residual_blocks, 64)
        self.assertEqual(decoder_preset('full_scale', 640), config)
        self.assertEqual(config.conditioning_dim, 640)
        self.assertEqual(DecoderConfig.from_dict(config.to_dict()), config)

    def test_invalid(self):
        self.assertRaises(UsageError, decoder_preset, 'huge', 28)
        self.assertRaises(UsageError, DecoderConfig, step_embed_dim=7)
        self.assertRaises(UsageError, DecoderConfig, hop=0)


class TestDenoiserModel(unittest.TestCase):
    def test_output_length(self):
        model = _perturbed_model()
        for rows in (1, 10, 20):
            out = denoiser_forward(model, np.zeros(rows * 320), 7, _conditioning(rows))
            self.assertEqual(tuple(out.shape), (rows * 320,))

    def test_untrained_output_is_zero(self):
        model = DenoiserModel(SMALL)
        out = denoiser_forward(model, np.random.default_rng(0).standard_normal(640), 3, _conditioning(2))
        self.assertEqual(float(out.abs().max()), 0.0)

    def test_deterministic(self):
        x = np.random.default_rng(1).standard_normal(640)
        c = _conditioning(2)
        with torch.no_grad():
            first = denoiser_forward(_perturbed_model(3), x, 5, c)
            second = denoiser_forward(_perturbed_model(3), x, 5, c)
        self.assertTrue(torch.equal(first, second))
        self.assertGreater(float(first.abs().max()), 0.0)

    def test_batch(self):
        model = _perturbed_model()
        out = model(torch.zeros(3, 640), torch.tensor([1, 2, 3]), torch.zeros(3, 2, 5))
        self.assertEqual(tuple(out.shape), (3, 640))

    def test_shape_errors(self):
        model = DenoiserModel(SMALL)
        self.assertRaises(ShapeMismatchError, denoiser_forward, model, np.zeros(600), 1, _conditioning(2))
        self.assertRaises(ShapeMismatchError, model, torch.zeros(1, 320), torch.ones(1), torch.zeros(1, 1, 4))


class TestConditioningSensitivity(unittest.TestCase):
    def setUp(self):
        self.model = _perturbed_model(4)
        self.content = np.random.default_rng(5).standard_normal((2, 2))
        self.speaker = np.array([0.5, -0.5])
        self.emotion = np.array([1.0])
        self.x = np.random.default_rng(6).standard_normal(640)

    def _predict(self, speaker, emotion):
        with torch.no_grad():
            return denoiser_forward(self.model, self.x, 9, assemble_conditioning(self.content, speaker, emotion))

    def test_speaker_block_changes_output(self):
        base = self._predict(self.speaker, self.emotion)
        moved = self._predict(self.speaker + np.array([0.8, 0.3]), self.emotion)
        self.assertGreater(float((base - moved).abs().max()), 1e-6)

    def test_emotion_block_changes_output(self):
        base = self._predict(self.speaker, self.emotion)
        moved = self._predict(self.speaker, self.emotion - 1.5)
        self.assertGreater(float((base - moved).abs().max()), 1e-6)

    def test_same_conditioning_same_output(self):
        self.assertTrue(torch.equal(self._predict(self.speaker, self.emotion),
                                    self._predict(self.speaker.copy(), self.emotion.copy())))


class TestUntrainedLoss(unittest.TestCase):
    def test_loss_is_crop_dimension(self):
        rng = np.random.default_rng(7)
        batch, rows = 16, 4
        schedule = make_schedule()
        x0 = torch.as_tensor(rng.uniform(-0.5, 0.5, (batch, rows * 320)), dtype=torch.float32)
        eps = torch.as_tensor(rng.standard_normal((batch, rows * 320)), dtype=torch.float32)
        t = torch.as_tensor(rng.integers(1, schedule.T + 1, batch))
        x_t = forward_sample(x0, t, eps, schedule)
        c = torch.as_tensor(rng.standard_normal((batch, rows, 5)), dtype=torch.float32)
        with torch.no_grad():
            loss = diffusion_loss(eps, DenoiserModel(SMALL)(x_t.float(), t, c)).item()
        self.assertLess(abs(loss / (rows * 320) - 1), 0.05)
