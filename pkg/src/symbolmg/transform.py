"""Unitary discrete Fourier transform of arbitrary length.

Lengths whose prime factors are 2, 3 and 5 go through a vectorized
mixed-radix recursion; any other length is handled with the chirp-z
(Bluestein) identity on top of a smooth padded length.

Convention: the forward kernel is ``exp(-2j*pi*j*k/n) / sqrt(n)`` so that
``dft`` applies the Fourier matrix ``F_n`` and ``idft`` its adjoint.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

RADICES = (5, 3, 2)


def factorize_smooth(n: int) -> list[int] | None:
    """Return the radix sequence for ``n`` or ``None`` if ``n`` is not 5-smooth."""
    factors = []
    m = n
    for r in RADICES:
        while m % r == 0:
            factors.append(r)
            m //= r
    if m != 1:
        return None
    return factors


def next_smooth(n: int) -> int:
    """Smallest 5-smooth integer ``>= n``."""
    m = max(int(n), 1)
    while factorize_smooth(m) is None:
        m += 1
    return m


@lru_cache(maxsize=None)
def _small_dft_matrix(r: int) -> np.ndarray:
    k = np.arange(r)
    return np.exp(-2j * np.pi * np.outer(k, k) / r)


@lru_cache(maxsize=256)
def _twiddles(n: int, r: int) -> np.ndarray:
    q = np.arange(r)[:, None]
    k = np.arange(n // r)[None, :]
    return np.exp(-2j * np.pi * q * k / n)


def _fft_smooth(x: np.ndarray, factors: tuple[int, ...]) -> np.ndarray:
    # Unnormalized forward transform along the last axis, decimation in time.
    n = x.shape[-1]
    if n == 1:
        return x.copy()
    r = factors[0]
    m = n // r
    # x[..., q + r*j] -> sub[..., q, j]
    sub = np.swapaxes(x.reshape(x.shape[:-1] + (m, r)), -1, -2)
    y = _fft_smooth(sub, factors[1:])
    y = y * _twiddles(n, r)
    out = np.matmul(_small_dft_matrix(r), y)
    return out.reshape(x.shape)


class DftPlan:
    """Precomputed data for transforms of one fixed length.

    Plans are immutable once built and may be shared between threads.
    """

    def __init__(self, n: int):
        n = int(n)
        if n < 1:
            raise ValueError(f"transform length must be positive, got {n}")
        self.n = n
        factors = factorize_smooth(n)
        if factors is not None:
            self._factors = tuple(factors)
            self._chirp = None
        else:
            self._factors = None
            m = next_smooth(2 * n - 1)
            k = np.arange(n)
            # k^2 mod 2n keeps the phase argument small for large n
            chirp = np.exp(-1j * np.pi * ((k * k) % (2 * n)) / n)
            kernel = np.zeros(m, dtype=complex)
            kernel[:n] = np.conj(chirp)
            kernel[m - n + 1:] = np.conj(chirp[1:])[::-1]
            self._chirp = chirp
            self._pad = m
            self._pad_factors = tuple(factorize_smooth(m))
            self._kernel_hat = _fft_smooth(kernel, self._pad_factors)

    def __repr__(self):
        path = "mixed-radix" if self._factors is not None else "bluestein"
        return f"DftPlan(n={self.n}, {path})"

    def _forward_raw(self, v: np.ndarray) -> np.ndarray:
        if self._factors is not None:
            return _fft_smooth(v, self._factors)
        n, m = self.n, self._pad
        a = np.zeros(v.shape[:-1] + (m,), dtype=complex)
        a[..., :n] = v * self._chirp
        conv = _fft_smooth(a, self._pad_factors) * self._kernel_hat
        # inverse via conjugation of the forward transform
        conv = np.conj(_fft_smooth(np.conj(conv), self._pad_factors)) / m
        return conv[..., :n] * self._chirp

    def _check(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        if v.shape[-1] != self.n:
            raise ValueError(f"expected length {self.n}, got {v.shape[-1]}")
        return v

    def forward(self, v) -> np.ndarray:
        v = self._check(v)
        return self._forward_raw(v) / np.sqrt(self.n)

    def inverse(self, v) -> np.ndarray:
        v = self._check(v)
        return np.conj(self._forward_raw(np.conj(v))) / np.sqrt(self.n)


@lru_cache(maxsize=128)
def plan(n: int) -> DftPlan:
    """Cached plan for length ``n``."""
    return DftPlan(n)


def dft(p: DftPlan | int, v) -> np.ndarray:
    """Unitary forward transform ``F_n v`` along the last axis."""
    if not isinstance(p, DftPlan):
        p = plan(int(p))
    return p.forward(v)


def idft(p: DftPlan | int, v) -> np.ndarray:
    """Unitary inverse transform ``F_n^H v`` along the last axis."""
    if not isinstance(p, DftPlan):
        p = plan(int(p))
    return p.inverse(v)
