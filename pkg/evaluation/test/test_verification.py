import unittest

import numpy as np

from utils import DataError
from datasets import Waveform
from evaluation import *


class LookupBackend:
    """Speaker vectors looked up by utterance id."""

    def __init__(self, vectors):
        self.vectors = vectors

    def speaker(self, waveform):
        return self.vectors[waveform.utterance_id]


def _utterance(name):
    return Waveform(np.zeros(16), utterance_id=name)


class TestEERThreshold(unittest.TestCase):
    def test_separated(self):
        threshold, eer = eer_threshold([0.9, 0.8, 0.95], [0.1, 0.4])
        self.assertAlmostEqual(threshold, 0.6)
        self.assertEqual(eer, 0.0)

    def test_overlapping(self):
        threshold, eer = eer_threshold([0.9, 0.5, 0.7, 0.8], [0.6, 0.2, 0.1, 0.3])
        self.assertGreater(eer, 0.0)
        self.assertLess(eer, 0.5)
        self.assertTrue(0.1 <= threshold <= 0.9)

    def test_single_class(self):
        self.assertRaises(DataError, eer_threshold, [0.9], [])
        self.assertRaises(DataError, eer_threshold, [], [0.1])


class TestSpeakerVerifier(unittest.TestCase):
    def setUp(self):
        rng = np.random.default_rng(0)
        centres = {'a': np.array([1.0, 0.0, 0.0]), 'b': np.array([0.0, 1.0, 0.0]), 'c': np.array([0.0, 0.0, 1.0])}
        vectors = {}
        self.utterances = {}
        for speaker, centre in centres.items():
            names = ['{}{}'.format(speaker, i) for i in range(6)]
            for name in names:
                vectors[name] = centre + 0.1 * rng.standard_normal(3)
            self.utterances[speaker] = [_utterance(n) for n in names]
        self.backend = LookupBackend(vectors)
        self.verifier = SpeakerVerifier(self.backend)
        self.verifier.calibrate({s: u[:4] for s, u in self.utterances.items()})
        self.enrollments = {s: self.verifier.enroll(u[:4]) for s, u in self.utterances.items()}

    def test_calibrated(self):
        self.assertIsNotNone(self.verifier.threshold)
        self.assertEqual(self.verifier.eer, 0.0)

    def test_genuine_accepted(self):
        for speaker, utterances in self.utterances.items():
            for utterance in utterances[4:]:
                self.assertTrue(self.verifier.accept(utterance, self.enrollments[speaker]))

    def test_impostor_rejected(self):
        self.assertFalse(self.verifier.accept(self.utterances['a'][5], self.enrollments['b']))

    def test_identify(self):
        self.assertEqual(self.verifier.identify(self.utterances['c'][4], self.enrollments), 'c')

    def test_uncalibrated(self):
        verifier = SpeakerVerifier(self.backend)
        self.assertRaises(DataError, verifier.accept, self.utterances['a'][0], self.enrollments['a'])

    def test_sv_accuracy(self):
        calibration = {s: u[:4] for s, u in self.utterances.items()}
        trials = [(self.utterances['a'][4], self.utterances['a'][:4]),
                  (self.utterances['b'][5], self.utterances['a'][:4])]
        self.assertEqual(sv_accuracy(trials, self.backend, calibration=calibration), 0.5)
        self.assertEqual(sv_accuracy(trials[:1], self.backend, threshold=-1.0), 1.0)

    def test_sv_accuracy_errors(self):
        self.assertRaises(DataError, sv_accuracy, [], self.backend, threshold=0.5)
        trials = [(self.utterances['a'][4], self.utterances['a'][:4])]
        self.assertRaises(DataError, sv_accuracy, trials, self.backend)
