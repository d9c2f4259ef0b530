import logging

import numpy as np
import torch

from utils import DataError, derive_seed, make_rng
from diffusion import assemble_conditioning, speaker_onehot, CONTENT_EMOTION_ONEHOT

logger = logging.getLogger(__name__)


class TrainingSet:
    """
    Train-split waveforms with their precomputed conditioning matrices.
    Embeddings come from the store only; encoders are never invoked here.
    """
    def __init__(self, corpus, store, dims, layout, hop, utterance_ids=None):
        self.hop = hop
        self.layout = layout
        self.speakers = corpus.seen_speakers
        ids = list(corpus.select(split='train').index) if utterance_ids is None else list(utterance_ids)
        if not ids:
            raise DataError('No training utterances selected')
        self.ids = ids
        self.samples = []
        self.conditioning = []
        for utterance_id in ids:
            waveform = corpus.load(utterance_id)
            content = store.get(utterance_id, 'content')
            S = content.shape[0]
            if S == 0:
                raise DataError('Training utterance {} has no whole segment'.format(utterance_id))
            if layout == CONTENT_EMOTION_ONEHOT:
                speaker = speaker_onehot(waveform.labels.speaker_id, self.speakers)
            else:
                speaker = store.get(utterance_id, 'speaker')
            c = assemble_conditioning(content, speaker, store.get(utterance_id, 'emotion'), dims=dims,
                                      layout=layout, n_speakers=len(self.speakers))
            self.samples.append(waveform.samples[:S * hop].astype(np.float32))
            self.conditioning.append(c.values)
        self.width = self.conditioning[0].shape[1]
        logger.info("Training set: %d utterances, conditioning width %d", len(ids), self.width)

    def __len__(self):
        return len(self.ids)

    def batch(self, seed, step, batch_size, crop_segments):
        '''
        Random crops for one step; depends only on (seed, step).
        Utterances shorter than the crop are zero-padded and repeat their last conditioning row.
        :return: (x0 tensor (B, crop * hop), conditioning tensor (B, crop, width))
        '''
        rng = make_rng(seed, 'batch', step)
        crop = crop_segments * self.hop
        x0 = np.zeros((batch_size, crop), dtype=np.float32)
        cond = np.zeros((batch_size, crop_segments, self.width), dtype=np.float32)
        for b, index in enumerate(rng.integers(0, len(self), size=batch_size)):
            c = self.conditioning[index]
            S = c.shape[0]
            start = int(rng.integers(0, S - crop_segments + 1)) if S >= crop_segments else 0
            rows = c[start:start + crop_segments]
            segment = self.samples[index][start * self.hop:(start + crop_segments) * self.hop]
            x0[b, :len(segment)] = segment
            cond[b] = np.pad(rows, ((0, crop_segments - rows.shape[0]), (0, 0)), mode='edge')
        return torch.from_numpy(x0), torch.from_numpy(cond)


def step_generator(seed, step):
    return torch.Generator().manual_seed(derive_seed(seed, 'noise', step) % 2 ** 63)
