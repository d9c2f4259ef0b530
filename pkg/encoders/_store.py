"""
On-disk embedding store.

Layout of a store directory:

    store.json        manifest
    embeddings.f32    raw payload, little-endian float32, records back to back

Manifest keys:

    version      format version, currently 1
    dtype        always "<f4"
    payload      payload file name, relative to the store directory
    sample_rate  sample rate of the audio the embeddings were computed from
    hop          samples per content row
    provenance   "oracle" or "external"
    records      list of {utterance_id, kind, shape, offset}; kind is one of
                 content | speaker | emotion, shape is [rows, dim] for content
                 and [dim] otherwise, offset is the byte offset in the payload
    labels       optional {utterance_id: {speaker, emotion}}

Embeddings computed by any external model can be ingested by writing these
two files.
"""
import os
from dataclasses import dataclass, field

import numpy as np

from utils import DataError, ShapeMismatchError, read_json, write_json
from datasets import DEFAULT_SAMPLE_RATE, DEFAULT_HOP

STORE_MANIFEST = 'store.json'
STORE_PAYLOAD = 'embeddings.f32'
STORE_VERSION = 1
STORE_DTYPE = '<f4'
KINDS = ('content', 'speaker', 'emotion')


class MissingRecordError(DataError):
    pass


@dataclass
class EmbeddingRecord:
    utterance_id: str
    kind: str
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DataError('Unknown embedding kind: {}'.format(self.kind))
        expected_ndim = 2 if self.kind == 'content' else 1
        if np.ndim(self.values) != expected_ndim:
            raise ShapeMismatchError('{} record {} must have {} dimensions, got shape {}'.format(
                self.kind, self.utterance_id, expected_ndim, np.shape(self.values)))


@dataclass
class EmbeddingStore:
    provenance: str = 'oracle'
    sample_rate: int = DEFAULT_SAMPLE_RATE
    hop: int = DEFAULT_HOP
    records: dict = field(default_factory=dict)
    labels: dict = field(default_factory=dict)

    def add(self, utterance_id, kind, values, speaker=None, emotion=None):
        self.records[(utterance_id, kind)] = EmbeddingRecord(utterance_id, kind, np.asarray(values, dtype=np.float32))
        if speaker is not None or emotion is not None:
            self.labels[utterance_id] = {'speaker': speaker, 'emotion': emotion}
        return self

    def get(self, utterance_id, kind):
        try:
            return self.records[(utterance_id, kind)].values
        except KeyError:
            raise MissingRecordError('No {} embedding for utterance {}'.format(kind, utterance_id)) from None

    def has(self, utterance_id, kind):
        return (utterance_id, kind) in self.records

    def utterance_ids(self, kind=None):
        return sorted({u for (u, k) in self.records if kind is None or k == kind})

    def __len__(self):
        return len(self.records)

    def equals(self, other):
        if (self.provenance, self.sample_rate, self.hop, self.labels) != \
                (other.provenance, other.sample_rate, other.hop, other.labels):
            return False
        if set(self.records) != set(other.records):
            return False
        return all(np.array_equal(np.asarray(self.records[k].values, dtype=np.float32),
                                  np.asarray(other.records[k].values, dtype=np.float32)) for k in self.records)


def save_store(store, path):
    '''
    Writes the store as a JSON manifest plus one float32 payload file.
    :param store: EmbeddingStore
    :param path: store directory
    '''
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise DataError('Cannot create store directory {}: {}'.format(path, e)) from e
    entries = []
    offset = 0
    with open(os.path.join(path, STORE_PAYLOAD), 'wb') as f:
        for key in sorted(store.records):
            record = store.records[key]
            data = np.ascontiguousarray(record.values, dtype=STORE_DTYPE)
            f.write(data.tobytes())
            entries.append({'utterance_id': record.utterance_id, 'kind': record.kind,
                            'shape': list(data.shape), 'offset': offset})
            offset += data.nbytes
    write_json({'version': STORE_VERSION, 'dtype': STORE_DTYPE, 'payload': STORE_PAYLOAD,
                'sample_rate': store.sample_rate, 'hop': store.hop, 'provenance': store.provenance,
                'records': entries, 'labels': store.labels}, os.path.join(path, STORE_MANIFEST))


def load_store(path):
    '''
    Memory-maps a store written by save_store or by an external exporter.
    :param path: store directory
    :return: EmbeddingStore with read-only record arrays
    '''
    manifest = read_json(os.path.join(path, STORE_MANIFEST))
    for key in ('version', 'dtype', 'payload', 'records'):
        if key not in manifest:
            raise DataError('Malformed store manifest: missing key "{}"'.format(key))
    if manifest['version'] != STORE_VERSION:
        raise DataError('Unsupported store version {}'.format(manifest['version']))
    if manifest['dtype'] != STORE_DTYPE:
        raise ShapeMismatchError('Store dtype must be {}, got {}'.format(STORE_DTYPE, manifest['dtype']))
    store = EmbeddingStore(provenance=manifest.get('provenance', 'external'),
                           sample_rate=manifest.get('sample_rate', DEFAULT_SAMPLE_RATE),
                           hop=manifest.get('hop', DEFAULT_HOP),
                           labels=manifest.get('labels', {}))
    payload_path = os.path.join(path, manifest['payload'])
    if not os.path.isfile(payload_path):
        raise DataError('Store payload not found: {}'.format(payload_path))
    n_floats = os.path.getsize(payload_path) // 4
    if not manifest['records']:
        return store
    if n_floats == 0:
        raise ShapeMismatchError('Store payload {} is empty but records are declared'.format(payload_path))
    payload = np.memmap(payload_path, dtype=STORE_DTYPE, mode='r')
    for entry in manifest['records']:
        try:
            utterance_id, kind, shape, offset = entry['utterance_id'], entry['kind'], entry['shape'], entry['offset']
        except (KeyError, TypeError):
            raise DataError('Malformed store record: {}'.format(entry)) from None
        if offset % 4 != 0:
            raise ShapeMismatchError('Record {}/{} is not float32 aligned'.format(utterance_id, kind))
        start = offset // 4
        count = int(np.prod(shape))
        if start + count > n_floats:
            raise ShapeMismatchError('Record {}/{} declares shape {} beyond the payload ({} floats)'.format(
                utterance_id, kind, shape, n_floats))
        store.records[(utterance_id, kind)] = EmbeddingRecord(utterance_id, kind,
                                                              payload[start:start + count].reshape(shape))
    return store
