import unittest

import numpy as np

from utils import DataError
from datasets import GeneratorParams, SynthUtteranceSpec, Waveform, generate_utterance
from evaluation import *


def _track(f0):
    f0 = np.asarray(f0, dtype=np.float64)
    return F0Track(f0=f0, voiced=f0 > 0)


class TestMCD(unittest.TestCase):
    def setUp(self):
        spec = SynthUtteranceSpec('spk02', 'angry', (2, 4, 6, 1), 5)
        self.waveform, _ = generate_utterance(spec, GeneratorParams())

    def test_identical(self):
        self.assertEqual(mcd(self.waveform, self.waveform), 0.0)

    def test_one_segment(self):
        short = Waveform(self.waveform.samples[:320])
        self.assertEqual(len(mel_cepstrum(short)), 1)
        self.assertEqual(mcd(short, short), 0.0)
        self.assertTrue(np.isfinite(mcd(short, Waveform(self.waveform.samples[320:640]))))

    def test_single_coefficient_offset(self):
        values = 100.0 * np.random.default_rng(0).standard_normal((20, 25))
        shifted = values.copy()
        shifted[:, 5] += 1.0
        result = mcd_from_cepstra(CepstraMatrix(values), CepstraMatrix(shifted))
        self.assertAlmostEqual(result, MCD_CONSTANT, delta=1e-6)
        self.assertAlmostEqual(MCD_CONSTANT, 10.0 / np.log(10.0) * np.sqrt(2.0))

    def test_gain_invariance(self):
        louder = Waveform(1.5 * self.waveform.samples)
        self.assertLess(mcd(self.waveform, louder), 0.05)

    def test_order_mismatch(self):
        self.assertRaises(DataError, mcd_from_cepstra, CepstraMatrix(np.zeros((3, 25))),
                          CepstraMatrix(np.zeros((3, 13))))


class TestPitchMetrics(unittest.TestCase):
    def test_vde_cases(self):
        ref = _track([100.0] * 10)
        self.assertEqual(vde(ref, ref), 0.0)
        flipped = _track([0.0, 0.0] + [100.0] * 8)
        self.assertEqual(vde(ref, flipped), 0.2)
        self.assertEqual(vde(ref, _track([0.0] * 10)), 1.0)

    def test_ffe_cases(self):
        ref = _track([100.0] * 10)
        self.assertEqual(ffe(ref, ref), 0.0)
        conv = _track([0.0, 125.0] + [100.0] * 8)
        self.assertEqual(ffe(ref, conv), 0.2)
        within = _track([115.0] + [100.0] * 9)
        self.assertEqual(ffe(ref, within), 0.0)

    def test_f0_rmse_cases(self):
        self.assertEqual(f0_rmse(_track([100.0] * 4), _track([110.0] * 4)), 10.0)
        self.assertEqual(f0_rmse(_track([100.0, 200.0]), _track([100.0, 200.0])), 0.0)
        self.assertEqual(f0_rmse(_track([100.0, 200.0]), _track([110.0, 190.0])), 10.0)

    def test_f0_rmse_needs_voiced_frames(self):
        self.assertRaises(DataError, f0_rmse, _track([100.0, 0.0]), _track([0.0, 120.0]))

    def test_truncation_and_mismatch(self):
        self.assertEqual(vde(_track([100.0] * 10), _track([100.0] * 9)), 0.0)
        self.assertRaises(DataError, vde, _track([100.0] * 10), _track([100.0] * 7))
        self.assertRaises(DataError, ffe, _track([]), _track([]))

    def test_vde_never_exceeds_ffe(self):
        rng = np.random.default_rng(4)
        for _ in range(500):
            n = int(rng.integers(1, 40))
            ref = _track(np.where(rng.random(n) < 0.6, rng.uniform(80, 300, n), 0.0))
            conv = _track(np.where(rng.random(n) < 0.6, rng.uniform(80, 300, n), 0.0))
            self.assertLessEqual(vde(ref, conv), ffe(ref, conv))
