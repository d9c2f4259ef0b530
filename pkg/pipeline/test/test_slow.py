import os
import shutil
import tempfile
import unittest

import numpy as np

from datasets import Corpus, CorpusConfig, GeneratorParams, generate_corpus
from encoders import OracleBackend, embed_corpus, save_store
from diffusion import load_checkpoint
from pipeline import *

RUN_SLOW = os.environ.get('EVC_RUN_SLOW') == '1'


def _smoothed(records, window=50):
    losses = np.array([r['loss'] for r in records])
    return losses[:window].mean(), losses[-window:].mean()


@unittest.skipUnless(RUN_SLOW, 'set EVC_RUN_SLOW=1 to run long training checks')
class TestLongTraining(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def _corpus(self, n_speakers, split_sizes):
        params = GeneratorParams(n_speakers=n_speakers)
        corpus = generate_corpus(CorpusConfig(os.path.join(self.tmp, 'corpus'), params, split_sizes=split_sizes,
                                              n_jobs=-1))
        store = os.path.join(self.tmp, 'store')
        save_store(embed_corpus(corpus, OracleBackend(params)), store)
        return corpus, store

    def test_overfits_single_utterance(self):
        corpus, store = self._corpus(2, (1, 0, 1))
        utterance = corpus.select(speaker='spk00', emotion='neutral', split='train').index[0]
        out = os.path.join(self.tmp, 'train')
        train(TrainConfig(manifest=corpus.path, store=store, out_dir=out, steps=2000, batch_size=4,
                          crop_segments=8, checkpoint_interval=1000, utterance_ids=(utterance,)))
        first, last = _smoothed(read_training_log(out))
        self.assertLess(last, 0.1 * first)

    def test_toy_conversion_quality(self):
        corpus, store = self._corpus(8, (24, 4, 4))
        untrained = train(TrainConfig(manifest=corpus.path, store=store, out_dir=os.path.join(self.tmp, 'init'),
                                      steps=0))
        trained = train(TrainConfig(manifest=corpus.path, store=store, out_dir=os.path.join(self.tmp, 'train'),
                                    steps=30000, batch_size=8, checkpoint_interval=5000))
        backend = OracleBackend(corpus.params)
        ids = list(corpus.select(speaker=corpus.seen_speakers, split='test').index[:16])
        before = self_reconstruction_mcd(corpus, load_checkpoint(untrained), backend, ids)
        after = self_reconstruction_mcd(corpus, load_checkpoint(trained), backend, ids)
        self.assertLess(after, 0.7 * before)

        report = evaluate(EvaluationConfig(manifest=corpus.path, checkpoint=trained, pairs_per_condition=64,
                                           n_jobs=-1))
        self.assertGreaterEqual(report.sv_accuracy('S2S'), 0.8)
        self.assertGreaterEqual(report.sv_accuracy('S2U'), 0.7)
        self.assertGreaterEqual(report.sv_accuracy('U2U'), 0.7)
        self.assertGreaterEqual(report.pairs['emotion_correct'].mean(), 0.7)
