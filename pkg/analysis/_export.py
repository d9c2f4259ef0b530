import os

import numpy as np
import pandas as pd

from utils import DataError, read_json, write_json
from encoders import MissingRecordError

LABEL_COLUMNS = ['utterance_id', 'speaker', 'emotion']


def sidecar_path(path):
    return os.path.splitext(path)[0] + '.json'


def speaker_embeddings(store, utterance_ids=None, kind='speaker'):
    '''
    Utterance-level vectors of a store with their labels.
    :param store: EmbeddingStore
    :param utterance_ids: selection, every utterance holding a record of this kind by default
    :return: (DataFrame with utterance_id, speaker and emotion columns, (N, D) float32 array)
    '''
    ids = store.utterance_ids(kind) if utterance_ids is None else list(utterance_ids)
    rows, vectors = [], []
    for utterance_id in ids:
        if not store.has(utterance_id, kind):
            raise MissingRecordError('Unknown utterance id or missing {} record: {}'.format(kind, utterance_id))
        label = store.labels.get(utterance_id) or {}
        rows.append([utterance_id, label.get('speaker') or '', label.get('emotion') or ''])
        vectors.append(np.asarray(store.get(utterance_id, kind), dtype=np.float32))
    frame = pd.DataFrame(rows, columns=LABEL_COLUMNS)
    dim = vectors[0].shape[0] if vectors else 0
    return frame, np.array(vectors, dtype=np.float32).reshape(len(vectors), dim)


def export_embeddings(store, selection, path, kind='speaker'):
    '''
    Writes a tab-separated table (utterance_id, speaker, emotion, v0 .. v{D-1}) for external
    2-D projection, plus a JSON sidecar with kind, dim and count.
    :param store: EmbeddingStore
    :param selection: utterance ids, or None for all
    :param path: TSV path
    '''
    labels, vectors = speaker_embeddings(store, selection, kind)
    columns = ['v{}'.format(i) for i in range(vectors.shape[1])]
    table = pd.concat([labels, pd.DataFrame(vectors.astype(np.float64), columns=columns)], axis=1)
    table.to_csv(path, sep='\t', index=False, float_format='%.9g')
    write_json({'kind': kind, 'dim': vectors.shape[1], 'count': vectors.shape[0],
                'provenance': store.provenance}, sidecar_path(path))
    return path


def import_embeddings(path):
    '''
    Reads a table written by export_embeddings.
    :return: (labels DataFrame, (N, D) float32 array)
    '''
    if not os.path.isfile(path):
        raise DataError('Embedding export not found: {}'.format(path))
    table = pd.read_csv(path, sep='\t', dtype={c: str for c in LABEL_COLUMNS}, keep_default_na=False)
    missing = [c for c in LABEL_COLUMNS if c not in table.columns]
    if missing:
        raise DataError('Embedding export {} lacks columns {}'.format(path, missing))
    value_columns = [c for c in table.columns if c not in LABEL_COLUMNS]
    meta = read_json(sidecar_path(path)) if os.path.isfile(sidecar_path(path)) else None
    if meta is not None and meta['dim'] != len(value_columns) and len(table):
        raise DataError('Embedding export {} declares dim {} but holds {} value columns'.format(
            path, meta['dim'], len(value_columns)))
    vectors = table[value_columns].to_numpy(dtype=np.float64).astype(np.float32)
    return table[LABEL_COLUMNS].reset_index(drop=True), vectors
