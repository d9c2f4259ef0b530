import json
import os
import tempfile
import unittest

import numpy as np

from utils import DataError
from evaluation import *


def _pair(condition='S2S', emotion='angry', mcd_db=6.0, sv=True, f0_rmse=12.0):
    return {'condition': condition, 'emotion': emotion, 'source_id': 's', 'reference_id': 'r', 'target_id': 't',
            'mcd': mcd_db, 'vde': 0.1, 'ffe': 0.2, 'f0_rmse': f0_rmse, 'sv_accept': sv,
            'speaker_correct': sv, 'emotion_correct': True}


class TestEvalReport(unittest.TestCase):
    def setUp(self):
        self.report = EvalReport([_pair(), _pair(sv=False, mcd_db=8.0), _pair('S2U', 'sad'),
                                  _pair('U2U', 'sad', f0_rmse=float('nan'))], meta={'layout': 'full'})

    def test_sv_accuracy(self):
        self.assertEqual(self.report.sv_accuracy('S2S'), 0.5)
        self.assertEqual(self.report.sv_accuracy(), 0.75)
        self.assertRaises(DataError, EvalReport([_pair()]).sv_accuracy, 'U2U')

    def test_aggregate(self):
        table = self.report.aggregate()
        self.assertEqual(table.loc[('S2S', 'angry'), 'mcd'], 7.0)
        self.assertEqual(table.loc[('S2S', 'angry'), 'sv_accuracy'], 0.5)
        self.assertTrue(np.isnan(table.loc[('U2U', 'sad'), 'f0_rmse']))

    def test_validation(self):
        bad = _pair()
        bad['vde'] = 1.5
        self.assertRaises(DataError, EvalReport, [bad])
        self.assertRaises(DataError, EvalReport, [_pair(mcd_db=-1.0)])
        self.assertRaises(DataError, EvalReport, [_pair(condition='X2Y')])

    def test_json_round_trip(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'report.json')
            self.report.to_json(path)
            with open(path) as f:
                raw = json.load(f)
            self.assertEqual(raw['summary']['S2S']['sv_accuracy'], 0.5)
            self.assertIsNone(raw['pairs'][3]['f0_rmse'])
            back = EvalReport.from_json(path)
            self.assertEqual(back.sv_accuracy('S2S'), 0.5)
            self.assertEqual(back.meta, {'layout': 'full'})

    def test_text_table(self):
        text = self.report.to_text()
        for token in ('S2S', 'S2U', 'U2U', 'Angry', 'Sad', 'MCD', 'SV', 'FFE', 'VDE'):
            self.assertIn(token, text)

    def test_summary_json(self):
        summary = json.loads(report_summary_json(self.report))
        self.assertEqual(set(summary), {'S2S', 'S2U', 'U2U'})

    def test_ablation_table(self):
        other = EvalReport([_pair(mcd_db=9.0, sv=False)])
        text = ablation_table({'full': self.report, 'content_speaker': other})
        self.assertIn('full', text)
        self.assertIn('content_speaker', text)
        self.assertIn('F0-RMSE', text)
        self.assertRaises(DataError, ablation_table, {'full': self.report}, 'X2Y')
