import json
import logging
import os
import time

import torch

from utils import DataError, NumericError, derive_seed, prepare_output_dir, runtime_string, write_json
from datasets import Corpus
from encoders import load_store, store_dims
from diffusion import (make_schedule, decoder_preset, DenoiserModel, conditioning_blocks, forward_sample,
                       diffusion_loss, Checkpoint, save_checkpoint, load_checkpoint, CONTENT_EMOTION_ONEHOT)
from ._data import TrainingSet, step_generator

logger = logging.getLogger(__name__)

TRAIN_LOG = 'train_log.ndjson'
FINAL_CHECKPOINT = 'checkpoint.pt'
CHECKPOINT_DIR = 'checkpoints'


def read_training_log(path):
    """Parses a newline-delimited JSON training log into a list of records."""
    if os.path.isdir(path):
        path = os.path.join(path, TRAIN_LOG)
    if not os.path.isfile(path):
        raise DataError('Training log not found: {}'.format(path))
    with open(path) as f:
        return [json.loads(line) for line in f if line.strip()]


def _initial_model(config, conditioning_dim, hop):
    torch.manual_seed(derive_seed(config.seed, 'init') % 2 ** 63)
    return DenoiserModel(decoder_preset(config.preset, conditioning_dim, hop))


def make_optimizer(model, learning_rate):
    '''
    Adam over the denoiser weights only; the encoders behind the embedding store stay frozen.
    :param model: DenoiserModel
    :param learning_rate: step size
    :return: torch.optim.Adam
    '''
    return torch.optim.Adam(model.parameters(), lr=learning_rate, betas=(0.9, 0.999))


def train(config):
    '''
    Trains the denoiser on precomputed embeddings with the encoders frozen.
    Every step draws its batch, steps and noise from (seed, step) alone, so a resumed
    run reproduces the unbroken trajectory.
    :param config: TrainConfig
    :return: path of the final checkpoint
    '''
    corpus = Corpus(config.manifest)
    store = load_store(config.store)
    dims = store_dims(store)
    hop = store.hop
    config.check_budget(hop)
    speakers = corpus.seen_speakers if config.layout == CONTENT_EMOTION_ONEHOT else ()
    width = sum(w for _, w in conditioning_blocks(dims, config.layout, len(corpus.seen_speakers)))
    schedule = make_schedule(config.T, config.beta_start, config.beta_end)

    msg = "Start training...\n\tpreset: {}\n\tlayout: {}\n\tsteps: {}\n\tbatch: {} x {} segments\n\t" \
          "learning rate: {}\n\tseed: {}".format(config.preset, config.layout, config.steps, config.batch_size,
                                                 config.crop_segments, config.learning_rate, config.seed)
    logger.info(msg)
    start = time.time()
    prepare_output_dir(config.out_dir)
    os.makedirs(os.path.join(config.out_dir, CHECKPOINT_DIR))
    write_json(config.to_dict(), os.path.join(config.out_dir, 'train_config.json'))

    data = TrainingSet(corpus, store, dims, config.layout, hop, config.utterance_ids)
    model = _initial_model(config, width, hop)
    optimizer = make_optimizer(model, config.learning_rate)
    first_step = 1
    if config.resume is not None:
        resumed = load_checkpoint(config.resume)
        if resumed.config != model.config or resumed.layout != config.layout:
            raise DataError('Checkpoint {} does not match the requested decoder and layout'.format(config.resume))
        model.load_state_dict(resumed.model.state_dict())
        if resumed.optimizer_state is not None:
            optimizer.load_state_dict(resumed.optimizer_state)
        first_step = resumed.step + 1
        logger.info("Resuming from step %d of %s", resumed.step, config.resume)

    def checkpoint(step, path):
        save_checkpoint(Checkpoint(model=model, schedule=schedule, encoder_dims=dims, layout=config.layout,
                                   speakers=speakers, step=step, sample_rate=store.sample_rate,
                                   optimizer_state=optimizer.state_dict()), path)

    model.train()
    with open(os.path.join(config.out_dir, TRAIN_LOG), 'w') as log:
        for step in range(first_step, config.steps + 1):
            x0, cond = data.batch(config.seed, step, config.batch_size, config.crop_segments)
            generator = step_generator(config.seed, step)
            t = torch.randint(1, schedule.T + 1, (config.batch_size,), generator=generator)
            eps = torch.randn(x0.shape, generator=generator)
            x_t = forward_sample(x0, t, eps, schedule)
            loss = diffusion_loss(eps, model(x_t, t, cond))
            if not torch.isfinite(loss):
                raise NumericError('Non-finite loss {} at step {}; aborting'.format(loss.item(), step))
            optimizer.zero_grad()
            loss.backward()
            torch.nn.utils.clip_grad_norm_(model.parameters(), config.grad_clip)
            optimizer.step()
            log.write(json.dumps({'step': step, 'loss': loss.item(), 'wallclock': time.time() - start}) + '\n')
            if step % config.checkpoint_interval == 0:
                checkpoint(step, os.path.join(config.out_dir, CHECKPOINT_DIR, 'step_{:07d}.pt'.format(step)))
                logger.info("Step %d: loss %.4f", step, loss.item())

    final = os.path.join(config.out_dir, FINAL_CHECKPOINT)
    checkpoint(max(config.steps, first_step - 1), final)
    logger.info("Checkpoint written to %s", final)
    logger.info("Time: %s sec.", runtime_string(start))
    return final