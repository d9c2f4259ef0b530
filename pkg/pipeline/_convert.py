import logging
import os

from utils import DataError, UsageError
from datasets import Corpus, FrameGrid, read_wav, write_wav, segment_count
from encoders import make_backend, encode_content, encode_speaker, encode_emotion, encode_speaker_averaged
from diffusion import (assemble_conditioning, speaker_onehot, reverse_sample, load_checkpoint, CONTENT_SPEAKER,
                       CONTENT_EMOTION_ONEHOT)

logger = logging.getLogger(__name__)


def resolve_utterance(path, corpus=None):
    '''
    Reads a WAV file and attaches its corpus id and labels when the file belongs to the corpus;
    otherwise the file stem serves as utterance id.
    :param path: WAV path
    :param corpus: optional Corpus
    :return: Waveform
    '''
    waveform = read_wav(path)
    if corpus is not None:
        target = os.path.abspath(path)
        rows = corpus.utterances
        matches = [i for i, p in zip(rows.index, rows['path'])
                   if os.path.abspath(os.path.join(corpus.root, p)) == target]
        if matches:
            waveform.utterance_id = matches[0]
            waveform.labels = corpus.labels(matches[0])
            return waveform
    waveform.utterance_id = os.path.splitext(os.path.basename(path))[0]
    return waveform


def convert_waveforms(source, reference, checkpoint, backend, emotion_source='source', seed=0,
                      extra_references=()):
    '''
    Content from the source, speaker from the reference, emotion from either; the
    output covers the source's whole segments whatever the reference length.
    :param source: Waveform
    :param reference: Waveform
    :param checkpoint: Checkpoint
    :param backend: encoder Backend with the checkpoint's dims
    :param emotion_source: source | reference
    :param seed: sampling seed
    :param extra_references: further reference Waveforms averaged into the speaker vector
    :return: Waveform of segment_count(source) * hop samples
    '''
    checkpoint.check_dims(backend.dims)
    S = segment_count(source, FrameGrid(hop=checkpoint.hop))
    if S == 0:
        raise DataError('Source of {} samples is shorter than one segment ({} samples)'.format(
            len(source), checkpoint.hop))
    content = encode_content(source, backend)
    if content.rows != S:
        raise DataError('Content has {} rows for a source of {} segments'.format(content.rows, S))
    if checkpoint.layout == CONTENT_EMOTION_ONEHOT:
        if reference.labels is None:
            raise DataError('The one-hot speaker layout needs a labeled reference utterance')
        speaker = speaker_onehot(reference.labels.speaker_id, checkpoint.speakers)
    elif extra_references:
        speaker = encode_speaker_averaged([reference] + list(extra_references), backend)
    else:
        speaker = encode_speaker(reference, backend)
    emotion = None
    if checkpoint.layout != CONTENT_SPEAKER:
        emotion = encode_emotion(source if emotion_source == 'source' else reference, backend)
    c = assemble_conditioning(content, speaker, emotion, dims=checkpoint.encoder_dims, layout=checkpoint.layout,
                              n_speakers=len(checkpoint.speakers))
    return reverse_sample(checkpoint.model, c, S * checkpoint.hop, seed, checkpoint.schedule,
                          sample_rate=checkpoint.sample_rate)


def convert(request):
    '''
    Runs one conversion request and writes the 16-bit output WAV.
    :param request: ConversionRequest
    :return: converted Waveform
    '''
    corpus = Corpus(request.manifest) if request.manifest is not None else None
    if request.backend == 'oracle' and corpus is None:
        raise UsageError('The oracle backend needs the corpus manifest')
    checkpoint = load_checkpoint(request.checkpoint)
    backend = make_backend(request.backend, params=corpus.params if corpus is not None else None,
                           dims=checkpoint.encoder_dims, store=request.store)
    source = resolve_utterance(request.source, corpus)
    reference = resolve_utterance(request.reference, corpus)
    extra = [resolve_utterance(p, corpus) for p in request.extra_references]
    msg = "Start conversion...\n\tsource: {}\n\treference: {}\n\temotion from: {}\n\tseed: {}".format(
        source.utterance_id, reference.utterance_id, request.emotion_source, request.seed)
    logger.info(msg)
    converted = convert_waveforms(source, reference, checkpoint, backend, request.emotion_source, request.seed,
                                  extra)
    write_wav(converted, request.output)
    logger.info("Converted speech written to %s", request.output)
    return converted
