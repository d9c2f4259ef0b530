import numpy as np

from utils import ShapeMismatchError
from ._base import Backend, ContentMatrix, SpeakerVector, EmotionVector, EncoderDims
from ._store import MissingRecordError


def store_dims(store):
    """Encoder dims declared by the first record of each kind; absent kinds default to 1."""
    dims = {}
    for (_, kind), record in sorted(store.records.items()):
        if kind not in dims:
            dims[kind] = int(np.shape(record.values)[-1])
    return EncoderDims(content=dims.get('content', 1), speaker=dims.get('speaker', 1),
                       emotion=dims.get('emotion', 1))


class ExternalBackend(Backend):
    """
    Serves embeddings computed outside this package, looked up by utterance id.
    """
    name = 'external'

    def __init__(self, store, dims=None):
        super().__init__(dims if dims is not None else store_dims(store), store.sample_rate, store.hop)
        self.store = store

    def _record(self, waveform, kind):
        self.check_sample_rate(waveform)
        if waveform.utterance_id is None:
            raise MissingRecordError('The external backend looks embeddings up by utterance id; '
                                     'the waveform has none')
        values = np.asarray(self.store.get(waveform.utterance_id, kind), dtype=np.float32)
        expected = getattr(self.dims, kind)
        if values.shape[-1] != expected:
            raise ShapeMismatchError('{} record of {} has dimension {}, expected {}'.format(
                kind, waveform.utterance_id, values.shape[-1], expected))
        return values

    def content(self, waveform):
        values = self._record(waveform, 'content')
        expected_rows = len(waveform) // self.hop
        if len(waveform) and values.shape[0] != expected_rows:
            raise ShapeMismatchError('Content record of {} has {} rows; the waveform has {} segments'.format(
                waveform.utterance_id, values.shape[0], expected_rows))
        return ContentMatrix(values=values, hop=self.hop)

    def speaker(self, waveform):
        values = self._record(waveform, 'speaker')
        return SpeakerVector(values=values, unit_norm=bool(abs(np.linalg.norm(values) - 1.0) <= 1e-6))

    def emotion(self, waveform):
        return EmotionVector(values=self._record(waveform, 'emotion'))
