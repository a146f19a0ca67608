import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symbolmg import transform
from symbolmg.oracle import fourier_matrix

SIZES = [1, 2, 3, 5, 6, 7, 8, 9, 11, 12, 13, 27, 49, 81, 97, 100, 243]


def _random_vector(n, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


@pytest.mark.parametrize("n", SIZES)
def test_matches_naive_kernel(n):
    x = _random_vector(n, n)
    assert np.allclose(transform.dft(n, x), fourier_matrix(n) @ x, atol=1e-12)
    assert np.allclose(transform.idft(n, x), fourier_matrix(n).conj().T @ x, atol=1e-12)


@pytest.mark.parametrize("n", [64, 729, 1000, 2184, 2187, 1021])
def test_matches_numpy_fft(n):
    x = _random_vector(n, 1)
    assert np.allclose(transform.dft(n, x), np.fft.fft(x) / np.sqrt(n), atol=1e-11)


def test_smooth_factorization():
    assert transform.factorize_smooth(360) == [5, 3, 3, 2, 2, 2]
    assert transform.factorize_smooth(7) is None
    assert transform.next_smooth(2 * 2184 - 1) == 4374
    assert transform.next_smooth(1) == 1


def test_plan_paths_and_errors():
    assert "bluestein" in repr(transform.plan(13))
    assert "mixed-radix" in repr(transform.plan(12))
    with pytest.raises(ValueError):
        transform.dft(8, np.zeros(7))
    with pytest.raises(ValueError):
        transform.DftPlan(0)


def test_batched_last_axis():
    X = np.stack([_random_vector(15, s) for s in range(4)])
    out = transform.dft(15, X)
    for row, x in zip(out, X):
        assert np.allclose(row, transform.dft(15, x))


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 300), seed=st.integers(0, 2**31))
def test_roundtrip_and_unitarity(n, seed):
    x = _random_vector(n, seed)
    y = transform.dft(n, x)
    assert np.allclose(transform.idft(n, y), x, atol=1e-12 * max(1, np.abs(x).max()) * np.sqrt(n))
    assert np.isclose(np.linalg.norm(y), np.linalg.norm(x), rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 200), seed=st.integers(0, 2**31))
def test_convolution_identity(n, seed):
    x, y = _random_vector(n, seed), _random_vector(n, seed + 1)
    circ = np.array([np.sum(x * y[(k - np.arange(n)) % n]) for k in range(n)])
    lhs = transform.dft(n, circ)
    rhs = np.sqrt(n) * transform.dft(n, x) * transform.dft(n, y)
    assert np.allclose(lhs, rhs, atol=1e-9 * max(1.0, np.abs(rhs).max()))
