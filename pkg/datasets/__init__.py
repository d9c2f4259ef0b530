from ._waveform import *
from ._synthetic import *
from ._corpus import *

__all__ = ['Waveform',
           'FrameGrid',
           'read_wav',
           'write_wav',
           'quantize',
           'segment_count',
           'WavFormatError',
           'MissingFileError',
           'ChannelCountError',
           'BitDepthError',
           'CompressionError',
           'DEFAULT_SAMPLE_RATE',
           'DEFAULT_HOP',
           'EMOTIONS',
           'PAUSE_TOKEN',
           'GeneratorParams',
           'SynthUtteranceSpec',
           'UtteranceLabels',
           'FactorTable',
           'UnknownLabelError',
           'make_content_tokens',
           'generate_utterance',
           'CorpusConfig',
           'Corpus',
           'generate_corpus',
           'SPLITS',
           'HOLDOUT_SPLIT',
           'TOY_SPLIT_SIZES',
           'FULL_SCALE_SPLIT_SIZES']
