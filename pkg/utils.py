import json
import logging
import os
import time

import numpy as np

try:
    from pyblake2 import blake2b
except ImportError:  # pyblake2 does not build on recent interpreters; hashlib ships the same API
    from hashlib import blake2b

logger = logging.getLogger(__name__)


class UsageError(ValueError):
    """Invalid arguments or configuration (CLI exit code 1)."""


class DataError(ValueError):
    """Missing, malformed or inconsistent data (CLI exit code 2)."""


class NumericError(ArithmeticError):
    """Non-finite values produced by a computation (CLI exit code 3)."""


class ShapeMismatchError(DataError):
    pass


# seed is derived by keying blake2b with the master seed and hashing the labels
def derive_seed(master_seed, *parts):
    """
    Derives a 64-bit seed from a master seed and any number of labels
    :param master_seed: non-negative integer
    :param parts: labels (speaker id, emotion, index, ...) mixed into the seed
    :return: int in [0, 2**64)
    """
    if master_seed < 0:
        raise ValueError('Master seed must be a non-negative integer')
    key = int(master_seed).to_bytes(8, 'little')
    b = blake2b(key=key, digest_size=8)
    b.update('|'.join(str(p) for p in parts).encode('utf-8'))
    return int.from_bytes(b.digest(), 'little')


def make_rng(master_seed, *parts):
    return np.random.default_rng(derive_seed(master_seed, *parts))


def prepare_output_dir(path):
    """
    Creates a write-once stage directory. Refuses to reuse a non-empty one.
    :param path: directory path
    :return: path
    """
    if os.path.isdir(path) and os.listdir(path):
        raise DataError('Output directory {} is not empty; stage outputs are write-once'.format(path))
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise DataError('Cannot create output directory {}: {}'.format(path, e)) from e
    return path


def write_json(obj, path):
    with open(path, 'w') as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write('\n')


def read_json(path):
    if not os.path.isfile(path):
        raise DataError('File not found: {}'.format(path))
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise DataError('Malformed JSON in {}: {}'.format(path, e)) from e


def runtime_string(start):
    runtime = int(time.time() - start)
    if runtime == 0:
        return "<1"
    return str(runtime)
