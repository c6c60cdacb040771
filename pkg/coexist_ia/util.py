""" utility functions """
import typing
import zlib

import numpy as np
import scipy.linalg

SeedKey = typing.Union[int, str]


def hermitian(matrix: np.ndarray) -> np.ndarray:
    """conjugate transpose"""
    return np.conj(matrix).T


def hermitian_part(matrix: np.ndarray) -> np.ndarray:
    """symmetrize away round-off so eigh sees an exactly hermitian matrix"""
    return 0.5 * (matrix + hermitian(matrix))


def normalize_columns(matrix: np.ndarray) -> np.ndarray:
    """scale every column to unit euclidean norm; zero columns are rejected"""
    norms = np.linalg.norm(matrix, axis=0)
    assert np.all(norms > 0), 'cannot normalize zero columns: %r' % norms
    return matrix / norms[np.newaxis, :]


def complex_normal(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """circularly-symmetric complex gaussian samples with the given variance"""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def random_orthonormal(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """orthonormal columns from the QR factor of a complex gaussian draw"""
    assert cols <= rows, 'cannot fit %d orthonormal columns in %d rows' % (cols, rows)
    q, r = np.linalg.qr(complex_normal(rng, (rows, cols)))
    # fix the phase of r's diagonal so the distribution is haar
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases[np.newaxis, :]


def numerical_rank(matrix: np.ndarray, tolerance: float) -> int:
    """count singular values at or above ``tolerance * sigma_max``"""
    if matrix.size == 0:
        return 0
    singular = scipy.linalg.svdvals(matrix)
    if singular[0] <= 0.0:
        return 0
    return int(np.sum(singular >= tolerance * singular[0]))


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def key_to_int(key: SeedKey) -> int:
    """map seed key parts to non-negative ints; strings go through crc32 so the map is stable"""
    if isinstance(key, str):
        return zlib.crc32(key.encode('utf-8'))
    if isinstance(key, (bool, np.bool_)) or int(key) != key or key < 0:
        raise ValueError('seed key parts must be strings or non-negative ints, got %r' % (key,))
    return int(key)


def stable_seed(master_seed: int, *keys: SeedKey) -> np.random.SeedSequence:
    """seed sequence keyed by the master seed and a tuple of labels"""
    return np.random.SeedSequence(entropy=key_to_int(master_seed),
                                  spawn_key=tuple(key_to_int(k) for k in keys))


def child_rng(master_seed: int, *keys: SeedKey) -> np.random.Generator:
    return np.random.default_rng(stable_seed(master_seed, *keys))
