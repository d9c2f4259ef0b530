import logging

import numpy as np
from sklearn.metrics import roc_curve
from sklearn.metrics.pairwise import cosine_similarity

from utils import DataError

logger = logging.getLogger(__name__)


def eer_threshold(genuine, impostor):
    '''
    Equal-error-rate operating point of a same/different-speaker score set.
    With perfectly separated classes the threshold sits midway between the
    lowest genuine and the highest impostor score.
    :param genuine: scores of same-speaker trials
    :param impostor: scores of different-speaker trials
    :return: (threshold, eer)
    '''
    genuine = np.asarray(genuine, dtype=np.float64)
    impostor = np.asarray(impostor, dtype=np.float64)
    if len(genuine) == 0 or len(impostor) == 0:
        raise DataError('Calibration needs both same-speaker and different-speaker trials')
    if genuine.min() > impostor.max():
        return float(0.5 * (genuine.min() + impostor.max())), 0.0
    labels = np.concatenate([np.ones(len(genuine)), np.zeros(len(impostor))])
    fpr, tpr, thresholds = roc_curve(labels, np.concatenate([genuine, impostor]))
    fnr = 1.0 - tpr
    idx = int(np.nanargmin(np.abs(fnr - fpr)))
    threshold = float(thresholds[idx])
    if not np.isfinite(threshold):
        threshold = float(genuine.max())
    return threshold, float(0.5 * (fpr[idx] + fnr[idx]))


class SpeakerVerifier:
    """
    Cosine scoring of speaker vectors against enrollment means.
    Any object with a speaker(waveform) method serves as backend.
    """
    def __init__(self, backend):
        self.backend = backend
        self.threshold = None
        self.eer = None
        self._cache = {}

    def embed(self, waveform):
        key = waveform.utterance_id
        if key is not None and key in self._cache:
            return self._cache[key]
        vector = self.backend.speaker(waveform)
        vector = np.asarray(getattr(vector, 'values', vector), dtype=np.float64)
        if key is not None:
            self._cache[key] = vector
        return vector

    def enroll(self, waveforms):
        if len(waveforms) == 0:
            raise DataError('Enrollment needs at least one utterance')
        return np.mean([self.embed(w) for w in waveforms], axis=0)

    @staticmethod
    def score_vectors(vector, enrollment):
        return float(cosine_similarity(np.atleast_2d(vector), np.atleast_2d(enrollment))[0, 0])

    def score(self, waveform, enrollment):
        return self.score_vectors(self.embed(waveform), enrollment)

    def calibrate(self, utterances_by_speaker):
        '''
        Sets the accept threshold at the EER point of real corpus utterances.
        Genuine trials score each utterance against its own speaker's other utterances,
        impostor trials against every other speaker's enrollment mean.
        :param utterances_by_speaker: dict speaker -> list of Waveform
        :return: threshold
        '''
        vectors = {s: np.array([self.embed(w) for w in ws]) for s, ws in utterances_by_speaker.items() if len(ws)}
        means = {s: v.mean(axis=0) for s, v in vectors.items()}
        genuine, impostor = [], []
        for speaker, v in vectors.items():
            for i in range(len(v)):
                if len(v) > 1:
                    genuine.append(self.score_vectors(v[i], np.delete(v, i, axis=0).mean(axis=0)))
                impostor.extend(self.score_vectors(v[i], means[other]) for other in means if other != speaker)
        self.threshold, self.eer = eer_threshold(genuine, impostor)
        logger.info("Speaker verification calibrated on %d genuine and %d impostor trials: threshold %.4f, EER %.3f",
                    len(genuine), len(impostor), self.threshold, self.eer)
        return self.threshold

    def accept(self, waveform, enrollment):
        if self.threshold is None:
            raise DataError('Verifier is not calibrated')
        return self.score(waveform, enrollment) >= self.threshold

    def identify(self, waveform, enrollments):
        """Speaker whose enrollment mean is most similar to the utterance."""
        vector = self.embed(waveform)
        names = list(enrollments)
        scores = cosine_similarity(np.atleast_2d(vector), np.array([enrollments[n] for n in names]))[0]
        return names[int(np.argmax(scores))]


def sv_accuracy(trials, backend, threshold=None, calibration=None):
    '''
    Fraction of converted utterances accepted as their target speaker.
    :param trials: list of (converted Waveform, list of target-speaker enrollment Waveforms)
    :param backend: speaker encoder backend
    :param threshold: fixed cosine threshold; if None it is calibrated at the EER point
    :param calibration: dict speaker -> list of real Waveforms, required when threshold is None
    :return: accepted fraction
    '''
    if len(trials) == 0:
        raise DataError('No verification trials given')
    verifier = SpeakerVerifier(backend)
    if threshold is None:
        if calibration is None:
            raise DataError('Either a threshold or a calibration set is required')
        verifier.calibrate(calibration)
    else:
        verifier.threshold = float(threshold)
    accepted = [verifier.accept(converted, verifier.enroll(enrollment)) for converted, enrollment in trials]
    return float(np.mean(accepted))
