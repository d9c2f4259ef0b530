import logging
import time

import numpy as np
from joblib import Parallel, delayed
from sklearn.discriminant_analysis import LinearDiscriminantAnalysis
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from utils import DataError, derive_seed, make_rng, runtime_string
from datasets import FactorTable, SynthUtteranceSpec, generate_utterance, make_content_tokens
from evaluation import extract_f0, mel_cepstrum

logger = logging.getLogger(__name__)

N_SPECTRAL = 8


def acoustic_features(waveform):
    '''
    Utterance-level pitch and spectral summary.
    :param waveform: Waveform at 16 kHz
    :return: vector [median semitone F0, semitone F0 std, mean c1..c8 over voiced frames, mean c0, std c0]
    '''
    track = extract_f0(waveform)
    cepstra = mel_cepstrum(waveform).values
    n = min(len(track), cepstra.shape[0])
    voiced = track.voiced[:n]
    if voiced.sum() >= 2:
        semitones = 12.0 * np.log2(track.f0[:n][voiced] / 100.0)
        pitch = [np.median(semitones), np.std(semitones)]
        spectral = cepstra[:n][voiced]
    else:
        pitch = [0.0, 0.0]
        spectral = cepstra[:n]
    return np.concatenate([pitch, spectral[:, 1:N_SPECTRAL + 1].mean(axis=0),
                           [cepstra[:, 0].mean(), cepstra[:, 0].std()]])


def _calibration_item(params, speaker, emotion, index):
    tokens = make_content_tokens(make_rng(params.master_seed, 'labeler-content', index), params)
    spec = SynthUtteranceSpec(speaker, emotion, tokens, derive_seed(params.master_seed, 'labeler', speaker, emotion, index))
    waveform, _ = generate_utterance(spec, params, FactorTable(params))
    return acoustic_features(waveform)


class AcousticLabeler:
    """
    Infers the (speaker, emotion) cell of unlabeled synthetic-family audio.
    Fitted on freshly generated calibration utterances of every cell, so it never sees corpus files.
    """
    def __init__(self, params, per_cell=6, n_jobs=1):
        if per_cell < 2:
            raise ValueError('The labeler needs at least two calibration utterances per cell')
        self.params = params
        self.per_cell = per_cell
        self.n_jobs = n_jobs
        self._model = None

    @property
    def fitted(self):
        return self._model is not None

    def fit(self):
        params = self.params
        cells = [(s, e) for s in params.speakers for e in params.emotions]
        msg = "Start fitting the acoustic labeler...\n\tcells: {}\n\tutterances per cell: {}".format(
            len(cells), self.per_cell)
        logger.info(msg)
        start = time.time()
        jobs = [(s, e, i) for s, e in cells for i in range(self.per_cell)]
        features = Parallel(n_jobs=self.n_jobs)(delayed(_calibration_item)(params, s, e, i) for s, e, i in jobs)
        labels = ['{}|{}'.format(s, e) for s, e, _ in jobs]
        self._model = make_pipeline(StandardScaler(), LinearDiscriminantAnalysis(solver='lsqr', shrinkage='auto'))
        self._model.fit(np.array(features), labels)
        logger.info("Time: %s sec.", runtime_string(start))
        return self

    def predict(self, waveform):
        '''
        :param waveform: Waveform
        :return: (speaker_id, emotion_id)
        '''
        if not self.fitted:
            self.fit()
        if len(waveform) == 0:
            raise DataError('Cannot label an empty waveform')
        label = self._model.predict(acoustic_features(waveform)[None, :])[0]
        speaker, emotion = label.split('|')
        return speaker, emotion
