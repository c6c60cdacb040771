# pylint: disable=missing-docstring
import zlib

import numpy as np
import pytest

from coexist_ia import util


def test_child_rng_is_stable_per_key():
    first = util.child_rng(1, 'channel', 0, 3).standard_normal(4)
    again = util.child_rng(1, 'channel', 0, 3).standard_normal(4)
    other = util.child_rng(1, 'channel', 0, 4).standard_normal(4)
    np.testing.assert_array_equal(first, again)
    assert not np.allclose(first, other)


def test_string_keys_use_stable_hash():
    assert util.key_to_int('proposed') == zlib.crc32(b'proposed')
    assert util.key_to_int('a') != util.key_to_int('b')


@pytest.mark.parametrize('key', [-1, 1.5, True])
def test_invalid_seed_keys(key):
    with pytest.raises(ValueError):
        util.key_to_int(key)


def test_random_orthonormal_columns(rng):
    q = util.random_orthonormal(rng, 6, 3)
    np.testing.assert_allclose(util.hermitian(q) @ q, np.eye(3), atol=1e-12)


def test_numerical_rank():
    assert util.numerical_rank(np.diag([1.0, 1e-3, 1e-9]), 1e-6) == 2
    assert util.numerical_rank(np.zeros((3, 3)), 1e-6) == 0


def test_complex_normal_variance(rng):
    samples = util.complex_normal(rng, 20000, 4.0)
    assert abs(np.mean(np.abs(samples) ** 2) - 4.0) < 0.15


def test_db_to_linear():
    assert util.db_to_linear(20.0) == pytest.approx(100.0)
    assert util.db_to_linear(0.0) == 1.0
