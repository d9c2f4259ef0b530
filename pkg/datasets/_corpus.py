import logging
import os
import time
from dataclasses import dataclass, field
from typing import Tuple

import pandas as pd
from joblib import Parallel, delayed

from utils import DataError, derive_seed, make_rng, prepare_output_dir, read_json, write_json, runtime_string
from ._synthetic import GeneratorParams, SynthUtteranceSpec, UtteranceLabels, FactorTable, generate_utterance, \
    make_content_tokens
from ._waveform import read_wav, write_wav

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'
MANIFEST_VERSION = 1
SPLITS = ('train', 'reference', 'test')
# unseen speakers' would-be training block; never used for training
HOLDOUT_SPLIT = 'holdout'

TOY_SPLIT_SIZES = (20, 4, 6)
FULL_SCALE_SPLIT_SIZES = (300, 20, 30)


@dataclass
class CorpusConfig:
    out_dir: str
    generator: GeneratorParams = field(default_factory=GeneratorParams)
    seen_speakers: Tuple[str, ...] = None
    unseen_speakers: Tuple[str, ...] = None
    split_sizes: Tuple[int, int, int] = TOY_SPLIT_SIZES
    n_jobs: int = 1

    def __post_init__(self):
        speakers = self.generator.speakers
        if self.seen_speakers is None:
            self.seen_speakers = speakers[:len(speakers) // 2]
        if self.unseen_speakers is None:
            self.unseen_speakers = tuple(s for s in speakers if s not in self.seen_speakers)
        self.seen_speakers = tuple(self.seen_speakers)
        self.unseen_speakers = tuple(self.unseen_speakers)
        if not self.seen_speakers:
            raise ValueError('At least one seen speaker is required')
        if set(self.seen_speakers) & set(self.unseen_speakers):
            raise ValueError('Seen and unseen speakers must be disjoint')
        unknown = set(self.seen_speakers + self.unseen_speakers) - set(speakers)
        if unknown:
            raise ValueError('Unknown speakers in partition: {}'.format(sorted(unknown)))
        if len(self.split_sizes) != 3 or min(self.split_sizes) < 0 or self.split_sizes[0] + self.split_sizes[2] == 0:
            raise ValueError('split_sizes must be three non-negative counts (train, reference, test)')


def _utterance_jobs(config):
    params = config.generator
    sizes = dict(zip(SPLITS, config.split_sizes))
    jobs = []
    for speaker in config.seen_speakers + config.unseen_speakers:
        seen = speaker in config.seen_speakers
        for emotion in params.emotions:
            for split in SPLITS:
                # content depends only on (split, index) so cells stay parallel
                name = split if seen or split != 'train' else HOLDOUT_SPLIT
                for index in range(sizes[split]):
                    tokens = make_content_tokens(make_rng(params.master_seed, 'content', split, index), params)
                    utt_id = '{}_{}_{}_{:04d}'.format(speaker, emotion, name, index)
                    jobs.append({'id': utt_id,
                                 'path': os.path.join('wavs', speaker, emotion, '{}_{:04d}.wav'.format(name, index)),
                                 'speaker': speaker, 'emotion': emotion, 'split': name, 'index': index,
                                 'content_tokens': list(tokens),
                                 'seed': derive_seed(params.master_seed, 'utterance', speaker, emotion, name, index)})
    return jobs


def _write_utterance(job, params, root):
    spec = SynthUtteranceSpec(job['speaker'], job['emotion'], tuple(job['content_tokens']), job['seed'])
    waveform, _ = generate_utterance(spec, params, FactorTable(params))
    path = os.path.join(root, job['path'])
    os.makedirs(os.path.dirname(path), exist_ok=True)
    write_wav(waveform, path)


def generate_corpus(config):
    '''
    Writes the synthetic corpus and its manifest.
    :param config: CorpusConfig
    :return: Corpus loaded from the written manifest
    '''
    params = config.generator
    msg = "Start corpus generation...\n\tspeakers: {} seen, {} unseen\n\tsplits: {}\n\tseed: {}".format(
        len(config.seen_speakers), len(config.unseen_speakers), config.split_sizes, params.master_seed)
    logger.info(msg)
    start = time.time()
    prepare_output_dir(config.out_dir)
    jobs = _utterance_jobs(config)
    Parallel(n_jobs=config.n_jobs)(delayed(_write_utterance)(job, params, config.out_dir) for job in jobs)

    cells = {}
    for job in jobs:
        cell = cells.setdefault('{}/{}'.format(job['speaker'], job['emotion']), {})
        cell.setdefault(job['split'], []).append(job['path'])
    manifest = {'version': MANIFEST_VERSION,
                'seed': params.master_seed,
                'generator': params.to_dict(),
                'speakers': {'seen': list(config.seen_speakers), 'unseen': list(config.unseen_speakers)},
                'emotions': list(params.emotions),
                'split_sizes': dict(zip(SPLITS, config.split_sizes)),
                'cells': cells,
                'utterances': jobs}
    write_json(manifest, os.path.join(config.out_dir, MANIFEST_NAME))
    logger.info("Corpus written: %d utterances to %s", len(jobs), config.out_dir)
    logger.info("Time: %s sec.", runtime_string(start))
    return Corpus(os.path.join(config.out_dir, MANIFEST_NAME))


class Corpus:
    """
    Utterance table of a generated corpus, backed by its manifest
    """
    def __init__(self, path):
        if os.path.isdir(path):
            path = os.path.join(path, MANIFEST_NAME)
        self.path = path
        self.root = os.path.dirname(os.path.abspath(path))
        self.manifest = read_json(path)
        for key in ('version', 'seed', 'generator', 'speakers', 'emotions', 'split_sizes', 'utterances'):
            if key not in self.manifest:
                raise DataError('Corpus manifest {} lacks key "{}"'.format(path, key))
        if self.manifest['version'] != MANIFEST_VERSION:
            raise DataError('Unsupported corpus manifest version {}'.format(self.manifest['version']))
        self.params = GeneratorParams.from_dict(self.manifest['generator'])
        self.seen_speakers = tuple(self.manifest['speakers']['seen'])
        self.unseen_speakers = tuple(self.manifest['speakers']['unseen'])
        self.emotions = tuple(self.manifest['emotions'])
        self.utterances = pd.DataFrame(self.manifest['utterances']).set_index('id', drop=False)

    @property
    def speakers(self):
        return self.seen_speakers + self.unseen_speakers

    @property
    def number_of_utterances(self):
        return len(self.utterances)

    def select(self, speaker=None, emotion=None, split=None):
        """
        Returns the rows matching every given filter; each filter may be a value or a list of values
        """
        rows = self.utterances
        for column, value in (('speaker', speaker), ('emotion', emotion), ('split', split)):
            if value is None:
                continue
            values = value if isinstance(value, (list, tuple, set)) else [value]
            rows = rows[rows[column].isin(values)]
        return rows

    def _row(self, utterance_id):
        try:
            return self.utterances.loc[utterance_id]
        except KeyError:
            raise DataError('Unknown utterance id: {}'.format(utterance_id)) from None

    def wav_path(self, utterance_id):
        return os.path.join(self.root, self._row(utterance_id)['path'])

    def labels(self, utterance_id):
        row = self._row(utterance_id)
        return UtteranceLabels(speaker_id=row['speaker'], emotion_id=row['emotion'],
                               content_tokens=tuple(row['content_tokens']))

    def load(self, utterance_id):
        """Reads an utterance and attaches its id and labels."""
        waveform = read_wav(self.wav_path(utterance_id))
        waveform.utterance_id = utterance_id
        waveform.labels = self.labels(utterance_id)
        return waveform

    def validate(self):
        '''
        Checks split sizes, split disjointness and the seen/unseen partition.
        :return: self
        '''
        sizes = self.manifest['split_sizes']
        counts = self.utterances.groupby(['speaker', 'emotion', 'split']).size()
        for speaker in self.speakers:
            for emotion in self.emotions:
                for split in SPLITS:
                    name = split if speaker in self.seen_speakers or split != 'train' else HOLDOUT_SPLIT
                    found = int(counts.get((speaker, emotion, name), 0))
                    if found != sizes[split]:
                        raise DataError('Cell {}/{} has {} {} utterances, expected {}'.format(
                            speaker, emotion, found, name, sizes[split]))
        if self.utterances['path'].duplicated().any():
            raise DataError('A path appears in more than one split')
        train_speakers = set(self.select(split='train')['speaker'])
        if train_speakers & set(self.unseen_speakers):
            raise DataError('Unseen speakers present in the train split')
        missing = [p for p in self.utterances['path'] if not os.path.isfile(os.path.join(self.root, p))]
        if missing:
            raise DataError('{} corpus files are missing, e.g. {}'.format(len(missing), missing[0]))
        return self
