import unittest

import numpy as np

from utils import DataError
from datasets import Waveform, GeneratorParams, SynthUtteranceSpec, generate_utterance
from evaluation import *


class TestMelCepstrum(unittest.TestCase):
    def setUp(self):
        spec = SynthUtteranceSpec('spk01', 'happy', (1, 3, 5, 7), 12)
        self.waveform, _ = generate_utterance(spec, GeneratorParams())

    def test_identical_inputs(self):
        a = mel_cepstrum(self.waveform)
        b = mel_cepstrum(Waveform(self.waveform.samples.copy()))
        np.testing.assert_array_equal(a.values, b.values)

    def test_order_and_frames(self):
        cepstra = mel_cepstrum(self.waveform)
        self.assertEqual(cepstra.order, CEPSTRAL_ORDER)
        self.assertEqual(len(cepstra), (len(self.waveform) - ANALYSIS_WINDOW) // ANALYSIS_HOP + 1)

    def test_gain_moves_only_c0(self):
        a = mel_cepstrum(self.waveform).values
        b = mel_cepstrum(Waveform(2.0 * self.waveform.samples)).values
        np.testing.assert_allclose(b[:, 1:], a[:, 1:], atol=1e-3)
        self.assertTrue(np.all(b[:, 0] > a[:, 0]))

    def test_short_waveform(self):
        self.assertEqual(mel_cepstrum(Waveform(np.zeros(100))).values.shape, (1, 25))
        self.assertRaises(DataError, mel_cepstrum, Waveform(np.zeros(0)))
