import logging
import time

import numpy as np

from utils import DataError, UsageError, runtime_string
from ._base import SpeakerVector, TOY_DIMS
from ._oracle import OracleBackend
from ._external import ExternalBackend
from ._store import EmbeddingStore, load_store

logger = logging.getLogger(__name__)

BACKENDS = ('oracle', 'external')


def make_backend(name, params=None, dims=TOY_DIMS, store=None):
    '''
    :param name: oracle | external
    :param params: GeneratorParams of the corpus (oracle)
    :param dims: EncoderDims (oracle; external dims come from the store)
    :param store: EmbeddingStore or store directory (external)
    :return: Backend
    '''
    if name == 'oracle':
        return OracleBackend(params, dims)
    if name == 'external':
        if store is None:
            raise UsageError('The external backend needs an embedding store')
        if isinstance(store, str):
            store = load_store(store)
        return ExternalBackend(store)
    raise UsageError('Unknown encoder backend "{}"; choose from {}'.format(name, ', '.join(BACKENDS)))


def encode_content(waveform, backend):
    return backend.content(waveform)


def encode_speaker(waveform, backend):
    return backend.speaker(waveform)


def encode_emotion(waveform, backend):
    return backend.emotion(waveform)


def encode_speaker_averaged(waveforms, backend):
    '''
    Mean of several reference utterances' speaker vectors, renormalized when the
    individual vectors are unit-norm.
    :param waveforms: non-empty list of Waveform
    :param backend: Backend
    :return: SpeakerVector
    '''
    if len(waveforms) == 0:
        raise DataError('Speaker averaging needs at least one utterance')
    vectors = [backend.speaker(w) for w in waveforms]
    mean = np.mean([v.values.astype(np.float64) for v in vectors], axis=0)
    if all(v.unit_norm for v in vectors):
        norm = np.linalg.norm(mean)
        if norm == 0:
            raise DataError('Speaker vectors cancel out; cannot normalize their mean')
        return SpeakerVector(values=mean / norm, unit_norm=True)
    return SpeakerVector(values=mean)


def embed_corpus(corpus, backend, utterance_ids=None):
    '''
    Precomputes content, speaker and emotion embeddings of corpus utterances.
    :param corpus: Corpus
    :param backend: Backend
    :param utterance_ids: subset to embed, all utterances by default
    :return: EmbeddingStore
    '''
    ids = list(corpus.utterances.index) if utterance_ids is None else list(utterance_ids)
    msg = "Start embedding...\n\tbackend: {}\n\tutterances: {}\n\tdims: {}".format(backend.name, len(ids), backend.dims)
    logger.info(msg)
    start = time.time()
    store = EmbeddingStore(provenance=backend.name, sample_rate=backend.sample_rate, hop=backend.hop)
    for utterance_id in ids:
        waveform = corpus.load(utterance_id)
        labels = waveform.labels
        store.add(utterance_id, 'content', backend.content(waveform).values,
                  speaker=labels.speaker_id, emotion=labels.emotion_id)
        store.add(utterance_id, 'speaker', backend.speaker(waveform).values)
        store.add(utterance_id, 'emotion', backend.emotion(waveform).values)
    logger.info("Time: %s sec.", runtime_string(start))
    return store
