import os
import tempfile
import unittest

import numpy as np

from utils import DataError
from encoders import EmbeddingStore, MissingRecordError
from analysis import *


class TestExport(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, 'embeddings.tsv')
        rng = np.random.default_rng(0)
        self.store = EmbeddingStore(provenance='oracle')
        for i in range(50):
            self.store.add('utt{:02d}'.format(i), 'speaker', rng.standard_normal(8),
                           speaker='spk{:02d}'.format(i % 2), emotion=('angry', 'sad')[i % 3 % 2])

    def tearDown(self):
        self.tmp.cleanup()

    def test_table_shape(self):
        export_embeddings(self.store, None, self.path)
        with open(self.path) as f:
            lines = f.read().splitlines()
        self.assertEqual(len(lines), 51)
        self.assertEqual(lines[0].split('\t')[:4], ['utterance_id', 'speaker', 'emotion', 'v0'])
        self.assertEqual(len(lines[1].split('\t')), 11)

    def test_round_trip(self):
        export_embeddings(self.store, None, self.path)
        labels, vectors = import_embeddings(self.path)
        self.assertEqual(vectors.shape, (50, 8))
        self.assertEqual(labels.loc[3, 'speaker'], 'spk01')
        np.testing.assert_array_equal(vectors[7], self.store.get('utt07', 'speaker'))

    def test_empty_selection(self):
        export_embeddings(self.store, [], self.path)
        with open(self.path) as f:
            lines = f.read().splitlines()
        self.assertEqual(lines, ['utterance_id\tspeaker\temotion'])

    def test_unknown_utterance(self):
        self.assertRaises(MissingRecordError, export_embeddings, self.store, ['nope'], self.path)

    def test_missing_export(self):
        self.assertRaises(DataError, import_embeddings, self.path)
