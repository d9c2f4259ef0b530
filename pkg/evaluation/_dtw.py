from dataclasses import dataclass

import librosa
import numpy as np
from scipy.spatial.distance import cdist

from utils import DataError


@dataclass
class Alignment:
    path: np.ndarray  # (K, 2) index pairs, start to end
    cost: float


def frame_costs(a, b):
    """Euclidean distance between every pair of frames on coefficients 1..M."""
    return cdist(a.values[:, 1:], b.values[:, 1:], metric='euclidean')


def dtw_align(a, b):
    '''
    Minimal-cost monotonic alignment with steps (1,1), (1,0), (0,1), pinned to both ends.
    :param a: CepstraMatrix
    :param b: CepstraMatrix
    :return: Alignment
    '''
    if len(a) == 0 or len(b) == 0:
        raise DataError('Cannot align an empty cepstral sequence')
    cumulative, warping_path = librosa.sequence.dtw(C=frame_costs(a, b), backtrack=True)
    return Alignment(path=np.asarray(warping_path[::-1]), cost=float(cumulative[-1, -1]))
