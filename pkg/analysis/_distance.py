import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy.spatial.distance import cdist

from utils import DataError, make_rng, write_json

logger = logging.getLogger(__name__)

DEFAULT_UTTERANCES = 240


@dataclass
class DistanceTable:
    """Mean cross-group Euclidean distances, rows and columns indexed by emotion."""
    speaker: str
    emotions: Tuple[str, ...]
    values: np.ndarray
    group_sizes: dict = field(default_factory=dict)

    def __post_init__(self):
        self.emotions = tuple(self.emotions)
        self.values = np.asarray(self.values, dtype=np.float64)
        n = len(self.emotions)
        if self.values.shape != (n, n):
            raise DataError('A table over {} emotions must be {}x{}, got {}'.format(n, n, n, self.values.shape))
        if np.any(self.values < 0):
            raise DataError('Distances must be non-negative')

    def to_frame(self):
        labels = [e.capitalize() for e in self.emotions]
        return pd.DataFrame(self.values, index=labels, columns=labels)

    def to_text(self):
        table = self.to_frame().to_string(float_format=lambda x: '{:.3f}'.format(x))
        return 'Speaker: {}\n{}'.format(self.speaker, table)

    def to_dict(self):
        return {'speaker': self.speaker, 'emotions': list(self.emotions), 'values': self.values.tolist(),
                'group_sizes': {e: list(s) for e, s in self.group_sizes.items()}}

    def to_json(self, path):
        write_json(self.to_dict(), path)


@dataclass
class DominanceReport:
    holds: bool
    failures: List[Tuple[str, str, str]] = field(default_factory=list)

    def __bool__(self):
        return self.holds

    def describe(self):
        if self.holds:
            return 'every diagonal entry is the strict minimum of its row and column'
        return '; '.join('{} vs {} ({})'.format(a, b, where) for a, b, where in self.failures)


def _split_groups(vectors, emotions, labels, speaker, seed, max_utterances):
    rng = make_rng(seed, 'groups', speaker)
    per_emotion = max(2, max_utterances // len(emotions))
    groups = {}
    for emotion in emotions:
        idx = np.flatnonzero(labels == emotion)
        if len(idx) < 2:
            raise DataError('Speaker {} has {} utterances of emotion {}; at least 2 are required'.format(
                speaker, len(idx), emotion))
        idx = rng.permutation(idx)[:per_emotion]
        half = len(idx) // 2
        groups[emotion] = (vectors[idx[:half]], vectors[idx[half:2 * half]])
    return groups


def distance_table(labels, vectors, speaker, seed, emotions=None, max_utterances=DEFAULT_UTTERANCES):
    '''
    Splits one speaker's utterances at random into two equal groups, per emotion, and averages
    the Euclidean distance over every cross-group pair of each emotion pair.
    :param labels: DataFrame with speaker and emotion columns, aligned with vectors
    :param vectors: (N, D) embeddings
    :param speaker: speaker id
    :param seed: group split seed
    :param emotions: row/column order; all emotions of the speaker by default
    :param max_utterances: utterances used per speaker, shared evenly across emotions
    :return: DistanceTable
    '''
    vectors = np.asarray(vectors, dtype=np.float64)
    mine = (labels['speaker'] == speaker).to_numpy()
    if not mine.any():
        raise DataError('No embeddings for speaker {}'.format(speaker))
    own_labels = labels['emotion'].to_numpy()[mine]
    emotions = tuple(emotions) if emotions is not None else tuple(dict.fromkeys(own_labels))
    groups = _split_groups(vectors[mine], emotions, own_labels, speaker, seed, max_utterances)
    values = np.array([[cdist(groups[a][0], groups[b][1]).mean() for b in emotions] for a in emotions])
    sizes = {e: (len(groups[e][0]), len(groups[e][1])) for e in emotions}
    return DistanceTable(speaker=speaker, emotions=emotions, values=values, group_sizes=sizes)


def distance_tables(labels, vectors, seed, speakers=None, emotions=None, max_utterances=DEFAULT_UTTERANCES,
                    n_jobs=1):
    speakers = list(dict.fromkeys(labels['speaker'])) if speakers is None else list(speakers)
    msg = "Start distance analysis...\n\tspeakers: {}\n\tutterances per speaker: {}\n\tseed: {}".format(
        len(speakers), max_utterances, seed)
    logger.info(msg)
    return Parallel(n_jobs=n_jobs)(delayed(distance_table)(labels, vectors, s, seed, emotions, max_utterances)
                                   for s in speakers)


def diagonal_dominance(table):
    '''
    True iff every diagonal entry is strictly below all other entries of its row and its column.
    :param table: DistanceTable
    :return: DominanceReport naming each offending (row, column) cell
    '''
    values = table.values
    names = table.emotions
    failures = []
    for i in range(len(names)):
        for j in range(len(names)):
            if i == j:
                continue
            if values[i, j] <= values[i, i]:
                failures.append((names[i], names[j], 'row'))
            if values[j, i] <= values[i, i]:
                failures.append((names[j], names[i], 'column'))
    return DominanceReport(holds=not failures, failures=failures)
