import json

import numpy as np
import pandas as pd

from utils import DataError, read_json, write_json

CONDITIONS = ('S2S', 'S2U', 'U2U')
PAIR_COLUMNS = ('condition', 'emotion', 'source_id', 'reference_id', 'target_id',
                'mcd', 'vde', 'ffe', 'f0_rmse', 'sv_accept', 'speaker_correct', 'emotion_correct')
FRACTIONS = ('vde', 'ffe', 'sv_accept', 'speaker_correct', 'emotion_correct')
TABLE_METRICS = (('mcd', 'MCD'), ('sv_accuracy', 'SV'), ('ffe', 'FFE'), ('vde', 'VDE'))


class EvalReport:
    """
    Per-pair metric values of a conversion run with their aggregates.
    f0_rmse is NaN for pairs without mutually voiced frames and is skipped in means.
    """
    def __init__(self, pairs, meta=None):
        if isinstance(pairs, list):
            pairs = pd.DataFrame(pairs, columns=list(PAIR_COLUMNS))
        missing = set(PAIR_COLUMNS) - set(pairs.columns)
        if missing:
            raise DataError('Evaluation pairs lack columns: {}'.format(sorted(missing)))
        self.pairs = pairs.reset_index(drop=True)
        self.meta = dict(meta or {})
        self.validate()

    def validate(self):
        p = self.pairs
        for column in FRACTIONS:
            values = p[column].astype(np.float64)
            if ((values < 0) | (values > 1)).any():
                raise DataError('{} must lie in [0, 1]'.format(column))
        for column in ('mcd', 'f0_rmse'):
            if (p[column].dropna() < 0).any():
                raise DataError('{} must be non-negative'.format(column))
        unknown = set(p['condition']) - set(CONDITIONS)
        if unknown:
            raise DataError('Unknown conditions: {}'.format(sorted(unknown)))
        return self

    def aggregate(self, by=('condition', 'emotion')):
        '''
        Means per group; sv_accuracy is the accepted fraction of the group's trials.
        :param by: grouping columns
        :return: DataFrame
        '''
        numeric = self.pairs[list(by) + ['mcd', 'vde', 'ffe', 'f0_rmse', 'sv_accept', 'speaker_correct',
                                         'emotion_correct']].copy()
        for column in ('sv_accept', 'speaker_correct', 'emotion_correct'):
            numeric[column] = numeric[column].astype(np.float64)
        table = numeric.groupby(list(by)).mean()
        return table.rename(columns={'sv_accept': 'sv_accuracy', 'speaker_correct': 'speaker_id_accuracy',
                                     'emotion_correct': 'emotion_accuracy'})

    def sv_accuracy(self, condition=None):
        rows = self.pairs if condition is None else self.pairs[self.pairs['condition'] == condition]
        if rows.empty:
            raise DataError('No trials for condition {}'.format(condition))
        return float(rows['sv_accept'].astype(np.float64).mean())

    def to_dict(self):
        summary = self.aggregate(by=('condition',))
        pairs = [{k: _plain(v) for k, v in record.items()} for record in self.pairs.to_dict(orient='records')]
        return {'meta': self.meta,
                'pairs': pairs,
                'summary': {c: {k: _json_float(v) for k, v in row.items()} for c, row in summary.iterrows()}}

    def to_json(self, path):
        write_json(self.to_dict(), path)

    @classmethod
    def from_json(cls, path):
        d = read_json(path)
        if 'pairs' not in d:
            raise DataError('Malformed evaluation report {}'.format(path))
        pairs = pd.DataFrame(d['pairs'], columns=list(PAIR_COLUMNS))
        pairs['f0_rmse'] = pairs['f0_rmse'].astype(np.float64)
        return cls(pairs, meta=d.get('meta'))

    def to_text(self):
        '''
        Conditions as rows, emotions x (MCD, SV, FFE, VDE) as columns.
        :return: aligned text table
        '''
        table = self.aggregate()
        emotions = list(dict.fromkeys(self.pairs['emotion']))
        conditions = [c for c in CONDITIONS if c in set(self.pairs['condition'])]
        columns = pd.MultiIndex.from_product([[e.capitalize() for e in emotions], [h for _, h in TABLE_METRICS]])
        grid = pd.DataFrame(index=conditions, columns=columns, dtype=np.float64)
        for (condition, emotion), row in table.iterrows():
            for key, header in TABLE_METRICS:
                grid.loc[condition, (emotion.capitalize(), header)] = row[key]
        return grid.to_string(float_format=lambda x: '{:.2f}'.format(x), na_rep='-')


def ablation_table(reports, condition='S2S'):
    '''
    One row per conditioning layout with MCD, SV and F0-RMSE means.
    :param reports: dict layout name -> EvalReport
    :return: aligned text table
    '''
    rows = {}
    for layout, report in reports.items():
        p = report.pairs[report.pairs['condition'] == condition]
        if p.empty:
            raise DataError('Report for layout {} has no {} trials'.format(layout, condition))
        rows[layout] = {'MCD': p['mcd'].mean(), 'SV': p['sv_accept'].astype(np.float64).mean(),
                        'F0-RMSE': p['f0_rmse'].mean()}
    return pd.DataFrame.from_dict(rows, orient='index').to_string(float_format=lambda x: '{:.2f}'.format(x),
                                                                  na_rep='-')


def _json_float(value):
    value = float(value)
    return None if np.isnan(value) else value


def _plain(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _json_float(value)
    return value


def report_summary_json(report):
    return json.dumps(report.to_dict()['summary'], sort_keys=True)
