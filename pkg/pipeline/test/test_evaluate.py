import os
import shutil
import tempfile
import unittest

import numpy as np

from utils import DataError, UsageError
from datasets import CorpusConfig, GeneratorParams, generate_corpus
from encoders import OracleBackend, embed_corpus, save_store
from evaluation import CONDITIONS
from pipeline import *

RUN_SLOW = os.environ.get('EVC_RUN_SLOW') == '1'


class TestPlanTrials(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.mkdtemp()
        params = GeneratorParams(n_speakers=4)
        cls.corpus = generate_corpus(CorpusConfig(os.path.join(cls.tmp, 'corpus'), params, split_sizes=(1, 1, 2)))

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.tmp)

    def test_conditions_respect_partition(self):
        seen, unseen = set(self.corpus.seen_speakers), set(self.corpus.unseen_speakers)
        expected = {'S2S': (seen, seen), 'S2U': (seen, unseen), 'U2U': (unseen, unseen)}
        for condition in CONDITIONS:
            for trial in plan_trials(self.corpus, condition, 8, seed=0):
                source = self.corpus.labels(trial['source_id'])
                target = self.corpus.labels(trial['target_id'])
                reference = self.corpus.labels(trial['reference_id'])
                self.assertIn(source.speaker_id, expected[condition][0])
                self.assertIn(target.speaker_id, expected[condition][1])
                self.assertNotEqual(source.speaker_id, target.speaker_id)
                self.assertEqual(reference.speaker_id, target.speaker_id)
                self.assertEqual(source.content_tokens, target.content_tokens)
                self.assertEqual(reference.emotion_id, trial['emotion'])

    def test_deterministic_and_capped(self):
        self.assertEqual(plan_trials(self.corpus, 'S2U', 5, seed=1), plan_trials(self.corpus, 'S2U', 5, seed=1))
        # 2 x 2 speaker pairs, 4 emotions, 2 test items
        self.assertEqual(len(plan_trials(self.corpus, 'S2U', 1000, seed=1)), 32)

    def test_evaluation_config(self):
        self.assertRaises(UsageError, EvaluationConfig, 'm', 'c', pairs_per_condition=0)
        self.assertRaises(UsageError, EvaluationConfig, 'm', 'c', conditions=('X2Y',))
        self.assertRaises(UsageError, EvaluationConfig, 'm', 'c', emotion_source='target')

    def test_self_reconstruction_needs_utterances(self):
        self.assertRaises(DataError, self_reconstruction_mcd, self.corpus, None, None, [])


@unittest.skipUnless(RUN_SLOW, 'set EVC_RUN_SLOW=1 to run the end-to-end pipeline')
class TestEndToEnd(unittest.TestCase):
    def test_train_then_evaluate(self):
        tmp = tempfile.mkdtemp()
        try:
            params = GeneratorParams(n_speakers=4)
            corpus = generate_corpus(CorpusConfig(os.path.join(tmp, 'corpus'), params, split_sizes=(4, 2, 2)))
            save_store(embed_corpus(corpus, OracleBackend(params)), os.path.join(tmp, 'store'))
            checkpoint = train(TrainConfig(manifest=corpus.path, store=os.path.join(tmp, 'store'),
                                           out_dir=os.path.join(tmp, 'train'), steps=20, batch_size=2,
                                           crop_segments=8, checkpoint_interval=10))
            report = evaluate(EvaluationConfig(manifest=corpus.path, checkpoint=checkpoint, pairs_per_condition=2))
            self.assertEqual(len(report.pairs), 6)
            for condition in CONDITIONS:
                self.assertTrue(0.0 <= report.sv_accuracy(condition) <= 1.0)
            self.assertTrue(np.all(np.isfinite(report.pairs['mcd'])))
        finally:
            shutil.rmtree(tmp)
