from ._distance import *
from ._export import *

__all__ = ['DistanceTable',
           'DominanceReport',
           'distance_table',
           'distance_tables',
           'diagonal_dominance',
           'DEFAULT_UTTERANCES',
           'speaker_embeddings',
           'export_embeddings',
           'import_embeddings']
