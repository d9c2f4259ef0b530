import unittest

import numpy as np

from utils import DataError
from datasets import Waveform
from evaluation import *


def _tone(freq, seconds=1.0, amplitude=0.5, sr=16000):
    t = np.arange(int(seconds * sr)) / sr
    return Waveform(amplitude * np.sin(2 * np.pi * freq * t), sr)


class TestExtractF0(unittest.TestCase):
    def test_pure_tone(self):
        track = extract_f0(_tone(200.0))
        self.assertGreaterEqual(track.voiced.mean(), 0.95)
        self.assertLess(abs(np.median(track.f0[track.voiced]) - 200.0), 4.0)

    def test_low_tone(self):
        track = extract_f0(_tone(90.0))
        self.assertLess(abs(np.median(track.f0[track.voiced]) - 90.0), 2.0)

    def test_quiet_noise_unvoiced(self):
        noise = Waveform(0.003 * np.random.default_rng(0).standard_normal(16000))
        self.assertGreaterEqual(1 - extract_f0(noise).voiced.mean(), 0.9)

    def test_silence_unvoiced(self):
        track = extract_f0(Waveform(np.zeros(16000)))
        self.assertFalse(track.voiced.any())
        self.assertTrue(np.all(track.f0 == 0))

    def test_frame_count(self):
        track = extract_f0(_tone(150.0, seconds=0.5))
        self.assertEqual(len(track), (8000 - ANALYSIS_WINDOW) // ANALYSIS_HOP + 1)

    def test_shorter_than_window(self):
        short = _tone(200.0, seconds=0.02)
        frames = frame_signal(short)
        self.assertEqual(frames.shape, (1, ANALYSIS_WINDOW))
        np.testing.assert_array_equal(frames[0, :320], short.samples)
        np.testing.assert_array_equal(frames[0, 320:], 0.0)
        self.assertEqual(len(extract_f0(short)), 1)

    def test_empty(self):
        self.assertRaises(DataError, extract_f0, Waveform(np.zeros(0)))

    def test_wrong_sample_rate(self):
        self.assertRaises(DataError, extract_f0, Waveform(np.zeros(8000), 8000))


class TestF0Track(unittest.TestCase):
    def test_voicing_consistency(self):
        self.assertRaises(DataError, F0Track, [100.0, 0.0], [True, True])
        self.assertRaises(DataError, F0Track, [100.0], [True, False])
        self.assertEqual(len(F0Track([100.0, 0.0], [True, False])), 2)
