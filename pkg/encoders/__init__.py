from ._base import *
from ._store import *
from ._labeler import *
from ._oracle import *
from ._external import *
from ._encode import *

__all__ = ['Backend',
           'EncoderDims',
           'TOY_DIMS',
           'FULL_SCALE_DIMS',
           'ContentMatrix',
           'SpeakerVector',
           'EmotionVector',
           'SampleRateError',
           'EmbeddingRecord',
           'EmbeddingStore',
           'MissingRecordError',
           'save_store',
           'load_store',
           'AcousticLabeler',
           'acoustic_features',
           'OracleBackend',
           'orthonormal_codes',
           'ExternalBackend',
           'store_dims',
           'BACKENDS',
           'make_backend',
           'encode_content',
           'encode_speaker',
           'encode_emotion',
           'encode_speaker_averaged',
           'embed_corpus']
