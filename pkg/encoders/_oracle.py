import numpy as np

from utils import DataError, make_rng
from datasets import GeneratorParams, FactorTable, FrameGrid, segment_count
from ._base import Backend, ContentMatrix, SpeakerVector, EmotionVector, TOY_DIMS
from ._labeler import AcousticLabeler


def orthonormal_codes(rng, n, dim):
    """n codes of unit norm; mutually orthogonal whenever dim >= n."""
    if dim >= n:
        q, _ = np.linalg.qr(rng.standard_normal((dim, n)))
        return q.T
    codes = rng.standard_normal((n, dim))
    return codes / np.linalg.norm(codes, axis=1, keepdims=True)


class OracleBackend(Backend):
    """
    Deterministic encoders of the synthetic corpus, built from the generator's factor structure.

    content  per hop, the code of the active token; speaker and emotion never enter it
    speaker  unit speaker signature plus a per-(speaker, emotion) offset, L2-normalized
    emotion  the shared emotion code only
    """
    name = 'oracle'

    def __init__(self, params=None, dims=TOY_DIMS, labeler=None):
        params = params if params is not None else GeneratorParams()
        super().__init__(dims, params.sample_rate, params.hop)
        self.params = params
        self.factors = FactorTable(params)
        self.labeler = labeler
        seed = params.master_seed
        if params.vocab_size <= dims.content:
            self._content_codes = np.eye(params.vocab_size, dims.content)
        else:
            self._content_codes = orthonormal_codes(make_rng(seed, 'oracle-content'), params.vocab_size, dims.content)
        signatures = orthonormal_codes(make_rng(seed, 'oracle-speaker'), params.n_speakers, dims.speaker)
        self._speaker_codes = dict(zip(params.speakers, signatures))
        self._speaker_vectors = {}
        for s in params.speakers:
            for e in params.emotions:
                direction = make_rng(seed, 'oracle-speaker-offset', s, e).standard_normal(dims.speaker)
                offset = params.speaker_offset_scale * direction / np.linalg.norm(direction)
                v = self._speaker_codes[s] + offset
                self._speaker_vectors[(s, e)] = v / np.linalg.norm(v)
        emotion_codes = orthonormal_codes(make_rng(seed, 'oracle-emotion'), len(params.emotions), dims.emotion)
        self._emotion_codes = dict(zip(params.emotions, emotion_codes))

    def _cell(self, waveform):
        labels = waveform.labels
        if labels is not None:
            speaker, emotion = labels.speaker_id, labels.emotion_id
        else:
            if self.labeler is None:
                self.labeler = AcousticLabeler(self.params)
            speaker, emotion = self.labeler.predict(waveform)
        # raises for ids outside the generator's factor table
        self.factors.cell(speaker, emotion)
        return speaker, emotion

    def content(self, waveform):
        self.check_sample_rate(waveform)
        if waveform.labels is None:
            raise DataError('Oracle content needs ground-truth content tokens; the waveform carries no labels')
        tokens = np.asarray(waveform.labels.content_tokens, dtype=np.int64)
        if tokens.size == 0 or tokens.min() < 0 or tokens.max() >= self.params.vocab_size:
            raise DataError('Content tokens outside [0, {})'.format(self.params.vocab_size))
        rows = segment_count(waveform, FrameGrid(hop=self.hop))
        index = np.minimum(np.arange(rows) // self.params.hops_per_token, len(tokens) - 1)
        return ContentMatrix(values=self._content_codes[tokens[index]].reshape(rows, self.dims.content), hop=self.hop)

    def speaker(self, waveform):
        self.check_sample_rate(waveform)
        return SpeakerVector(values=self._speaker_vectors[self._cell(waveform)].copy(), unit_norm=True)

    def emotion(self, waveform):
        self.check_sample_rate(waveform)
        _, emotion = self._cell(waveform)
        return EmotionVector(values=self._emotion_codes[emotion].copy())

    def emotion_code(self, emotion):
        try:
            return self._emotion_codes[emotion].copy()
        except KeyError:
            raise DataError('Unknown emotion id: {}'.format(emotion)) from None

    def nearest_emotion(self, vector):
        """Emotion whose code is closest to the given emotion vector."""
        names = list(self._emotion_codes)
        distances = [np.linalg.norm(np.asarray(vector) - self._emotion_codes[e]) for e in names]
        return names[int(np.argmin(distances))]
