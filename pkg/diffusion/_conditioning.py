from dataclasses import dataclass
from typing import Tuple

import numpy as np

from utils import DataError, ShapeMismatchError, UsageError

FULL = 'full'
CONTENT_SPEAKER = 'content_speaker'
CONTENT_EMOTION_ONEHOT = 'content_emotion_onehot'
LAYOUTS = (FULL, CONTENT_SPEAKER, CONTENT_EMOTION_ONEHOT)


@dataclass
class Conditioning:
    """
    Segment-rate side input of the denoiser: one row per segment, column blocks in
    layout order. Every block except content repeats one utterance-level vector.
    """
    values: np.ndarray
    blocks: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float32)
        if self.values.ndim != 2:
            raise ShapeMismatchError('Conditioning must be a segments x width matrix')
        if sum(w for _, w in self.blocks) != self.values.shape[1]:
            raise ShapeMismatchError('Conditioning width {} does not match its blocks {}'.format(
                self.values.shape[1], self.blocks))
        for name, block in self.block_views().items():
            if name != 'content' and block.shape[0] and np.any(block != block[0]):
                raise DataError('Rows of the {} block must all be identical'.format(name))

    @property
    def rows(self):
        return self.values.shape[0]

    @property
    def width(self):
        return self.values.shape[1]

    def block_views(self):
        views, start = {}, 0
        for name, width in self.blocks:
            views[name] = self.values[:, start:start + width]
            start += width
        return views


def conditioning_blocks(dims, layout=FULL, n_speakers=None):
    '''
    Column blocks of a conditioning layout.
    :param dims: EncoderDims
    :param layout: full | content_speaker | content_emotion_onehot
    :param n_speakers: size of the speaker one-hot code (content_emotion_onehot only)
    :return: tuple of (block name, width)
    '''
    if layout == FULL:
        return ('content', dims.content), ('speaker', dims.speaker), ('emotion', dims.emotion)
    if layout == CONTENT_SPEAKER:
        return ('content', dims.content), ('speaker', dims.speaker)
    if layout == CONTENT_EMOTION_ONEHOT:
        if not n_speakers:
            raise UsageError('The one-hot speaker layout needs the number of training speakers')
        return ('content', dims.content), ('speaker_onehot', int(n_speakers)), ('emotion', dims.emotion)
    raise UsageError('Unknown conditioning layout "{}"; choose from {}'.format(layout, ', '.join(LAYOUTS)))


def speaker_onehot(speaker_id, speakers):
    if speaker_id not in speakers:
        raise DataError('Speaker {} has no one-hot code; the layout only knows {}'.format(
            speaker_id, ', '.join(speakers)))
    code = np.zeros(len(speakers))
    code[list(speakers).index(speaker_id)] = 1.0
    return code


def upsample_embedding(v, S):
    '''
    Repeats an utterance-level vector once per segment.
    :param v: vector
    :param S: segment count, at least 1
    :return: S x dim matrix
    '''
    if S < 1:
        raise DataError('Cannot upsample to {} segments'.format(S))
    v = np.asarray(getattr(v, 'values', v))
    if v.ndim != 1:
        raise ShapeMismatchError('Only one-dimensional vectors can be upsampled, got shape {}'.format(v.shape))
    return np.tile(v, (int(S), 1))


def assemble_conditioning(content, speaker=None, emotion=None, dims=None, layout=FULL, n_speakers=None):
    '''
    Concatenates the content matrix with the repeated utterance-level vectors, segment by segment.
    :param content: ContentMatrix or S x D_c array
    :param speaker: speaker vector, or the speaker one-hot code for content_emotion_onehot
    :param emotion: emotion vector; ignored by content_speaker
    :param dims: EncoderDims the blocks must match; inferred from the inputs when None
    :param layout: conditioning layout
    :param n_speakers: one-hot code size for content_emotion_onehot
    :return: Conditioning
    '''
    content = np.asarray(getattr(content, 'values', content))
    if content.ndim != 2:
        raise ShapeMismatchError('Content representation must be two-dimensional')
    vectors = {'content': content, 'speaker': speaker, 'speaker_onehot': speaker, 'emotion': emotion}
    if dims is None:
        for name in _layout_names(layout):
            if vectors[name] is None:
                raise DataError('The {} layout needs a {} block'.format(layout, name))
        blocks = tuple((name, int(np.shape(getattr(vectors[name], 'values', vectors[name]))[-1]))
                       for name in _layout_names(layout))
    else:
        blocks = conditioning_blocks(dims, layout, n_speakers)
    S = content.shape[0]
    if S == 0:
        raise DataError('Cannot condition on zero segments')
    columns = []
    for name, width in blocks:
        value = vectors[name]
        if value is None:
            raise DataError('The {} layout needs a {} block'.format(layout, name))
        block = content if name == 'content' else upsample_embedding(value, S)
        if block.shape[1] != width:
            raise ShapeMismatchError('{} block has width {}, expected {}'.format(name, block.shape[1], width))
        columns.append(block)
    return Conditioning(values=np.hstack(columns), blocks=blocks)


def _layout_names(layout):
    names = {FULL: ('content', 'speaker', 'emotion'),
             CONTENT_SPEAKER: ('content', 'speaker'),
             CONTENT_EMOTION_ONEHOT: ('content', 'speaker_onehot', 'emotion')}
    if layout not in names:
        raise UsageError('Unknown conditioning layout "{}"'.format(layout))
    return names[layout]
