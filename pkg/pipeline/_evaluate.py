import logging
import time
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from utils import DataError, UsageError, derive_seed, make_rng, runtime_string
from datasets import Corpus
from encoders import OracleBackend, AcousticLabeler, make_backend, TOY_DIMS
from evaluation import (extract_f0, mcd, vde, ffe, f0_rmse, SpeakerVerifier, EvalReport, CONDITIONS)
from diffusion import load_checkpoint
from ._config import EMOTION_SOURCES
from ._convert import convert_waveforms

logger = logging.getLogger(__name__)


@dataclass
class EvaluationConfig:
    manifest: str
    checkpoint: str
    backend: str = 'oracle'
    store: Optional[str] = None
    pairs_per_condition: int = 64
    conditions: Tuple[str, ...] = CONDITIONS
    emotion_source: str = 'source'
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self):
        if self.pairs_per_condition <= 0:
            raise UsageError('pairs_per_condition must be positive')
        unknown = set(self.conditions) - set(CONDITIONS)
        if unknown:
            raise UsageError('Unknown conditions: {}'.format(sorted(unknown)))
        if self.emotion_source not in EMOTION_SOURCES:
            raise UsageError('emotion_source must be one of {}'.format(', '.join(EMOTION_SOURCES)))
        self.conditions = tuple(self.conditions)


def _speaker_pairs(corpus, condition):
    seen, unseen = corpus.seen_speakers, corpus.unseen_speakers
    sources, targets = {'S2S': (seen, seen), 'S2U': (seen, unseen), 'U2U': (unseen, unseen)}[condition]
    return [(s, t) for s in sources for t in targets if s != t]


def plan_trials(corpus, condition, count, seed):
    '''
    Draws cross-speaker conversion trials. The source comes from the test split, the reference
    from the target speaker's reference split with the same emotion, and the target is the target
    speaker's test utterance with the same content.
    :return: list of dicts with condition, emotion, source_id, reference_id, target_id
    '''
    pairs = _speaker_pairs(corpus, condition)
    if not pairs:
        raise DataError('The corpus has no speaker pairs for condition {}'.format(condition))
    test = corpus.select(split='test')
    n_test = int(test['index'].max()) + 1 if len(test) else 0
    n_reference = corpus.manifest['split_sizes']['reference']
    if n_test == 0 or n_reference == 0:
        raise DataError('Evaluation needs non-empty test and reference splits')
    candidates = [(s, t, e, i) for s, t in pairs for e in corpus.emotions for i in range(n_test)]
    rng = make_rng(seed, 'trials', condition)
    chosen = sorted(rng.choice(len(candidates), size=min(count, len(candidates)), replace=False))
    trials = []
    for k in chosen:
        source_speaker, target_speaker, emotion, index = candidates[k]
        reference_index = int(make_rng(seed, 'reference', condition, k).integers(n_reference))
        trials.append({'condition': condition, 'emotion': emotion,
                       'source_id': '{}_{}_test_{:04d}'.format(source_speaker, emotion, index),
                       'reference_id': '{}_{}_reference_{:04d}'.format(target_speaker, emotion, reference_index),
                       'target_id': '{}_{}_test_{:04d}'.format(target_speaker, emotion, index),
                       'target_speaker': target_speaker})
    return trials


def _f0_rmse_or_nan(ref, conv):
    try:
        return f0_rmse(ref, conv)
    except DataError:
        return float('nan')


def _run_trial(trial, corpus, checkpoint, backend, verifier, enrollments, oracle, emotion_source, seed):
    source = corpus.load(trial['source_id'])
    reference = corpus.load(trial['reference_id'])
    target = corpus.load(trial['target_id'])
    converted = convert_waveforms(source, reference, checkpoint, backend, emotion_source,
                                  derive_seed(seed, 'convert', trial['source_id'], trial['reference_id']) % 2 ** 32)
    ref_track, conv_track = extract_f0(target), extract_f0(converted)
    expected_emotion = (source if emotion_source == 'source' else reference).labels.emotion_id
    return {'condition': trial['condition'], 'emotion': trial['emotion'],
            'source_id': trial['source_id'], 'reference_id': trial['reference_id'], 'target_id': trial['target_id'],
            'mcd': mcd(target, converted), 'vde': vde(ref_track, conv_track), 'ffe': ffe(ref_track, conv_track),
            'f0_rmse': _f0_rmse_or_nan(ref_track, conv_track),
            'sv_accept': bool(verifier.accept(converted, enrollments[trial['target_speaker']])),
            'speaker_correct': verifier.identify(converted, enrollments) == trial['target_speaker'],
            'emotion_correct': oracle.nearest_emotion(oracle.emotion(converted).values) == expected_emotion}


def evaluate(config):
    '''
    Converts test utterances under the S2S, S2U and U2U conditions and scores the outputs
    against parallel target utterances. Speaker and emotion scoring use the oracle encoders,
    calibrated on real reference-split audio.
    :param config: EvaluationConfig
    :return: EvalReport
    '''
    corpus = Corpus(config.manifest)
    checkpoint = load_checkpoint(config.checkpoint)
    backend = make_backend(config.backend, params=corpus.params, dims=checkpoint.encoder_dims, store=config.store)
    oracle = backend if isinstance(backend, OracleBackend) else OracleBackend(corpus.params, TOY_DIMS)
    if oracle.labeler is None:
        oracle.labeler = AcousticLabeler(corpus.params, n_jobs=config.n_jobs)
    if not oracle.labeler.fitted:
        oracle.labeler.fit()

    msg = "Start evaluation...\n\tcheckpoint: {}\n\tlayout: {}\n\tconditions: {}\n\tpairs per condition: {}".format(
        config.checkpoint, checkpoint.layout, ', '.join(config.conditions), config.pairs_per_condition)
    logger.info(msg)
    start = time.time()
    verifier = SpeakerVerifier(oracle)
    references = {s: [corpus.load(i) for i in corpus.select(speaker=s, split='reference').index]
                  for s in corpus.speakers}
    verifier.calibrate(references)
    enrollments = {s: verifier.enroll(ws) for s, ws in references.items()}

    trials = [trial for condition in config.conditions
              for trial in plan_trials(corpus, condition, config.pairs_per_condition, config.seed)]
    rows = Parallel(n_jobs=config.n_jobs, backend='threading')(
        delayed(_run_trial)(trial, corpus, checkpoint, backend, verifier, enrollments, oracle,
                            config.emotion_source, config.seed) for trial in trials)
    report = EvalReport(rows, meta={'checkpoint': config.checkpoint, 'layout': checkpoint.layout,
                                    'backend': config.backend, 'emotion_source': config.emotion_source,
                                    'seed': config.seed, 'sv_threshold': verifier.threshold,
                                    'sv_eer': verifier.eer, 'trials': len(rows)})
    logger.info("Time: %s sec.", runtime_string(start))
    return report


def self_reconstruction_mcd(corpus, checkpoint, backend, utterance_ids, seed=0):
    '''
    Mean MCD between utterances and their self-conversions (source = reference).
    :return: dB
    '''
    if not utterance_ids:
        raise DataError('No utterances given for self-reconstruction')
    scores = []
    for utterance_id in utterance_ids:
        waveform = corpus.load(utterance_id)
        converted = convert_waveforms(waveform, waveform, checkpoint, backend,
                                      seed=derive_seed(seed, 'self', utterance_id) % 2 ** 32)
        scores.append(mcd(waveform, converted))
    return float(np.mean(scores))
