"""Circulant, g-circulant and Toeplitz operators generated by symbols.

All operators expose ``matvec``/``rmatvec`` running in ``O(n log n)`` through
:mod:`symbolmg.transform` and a guarded ``materialize`` for dense checks.
Cutting operators select every ``g``-th entry (optionally skipping ``zeta``
boundary entries on each side, as needed for Toeplitz levels).
"""
from __future__ import annotations

import numpy as np

from . import transform
from .symbol import TWO_PI, FourierSeries, TrigPoly, coarse_symbol, mod_square

DENSE_LIMIT = 4096


def _as_vector(x, n: int) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[-1] != n:
        raise ValueError(f"length mismatch: operator size {n}, vector length {x.shape[-1]}")
    return x


def _guard(n: int) -> None:
    if n > DENSE_LIMIT:
        raise ValueError(f"refusing to materialize a {n}x{n} matrix (limit {DENSE_LIMIT})")


def _apply_circulant(eigs: np.ndarray, x: np.ndarray) -> np.ndarray:
    p = transform.plan(eigs.shape[-1])
    return p.forward(eigs * p.inverse(x))


class CirculantOp:
    """``C_n(f) = F_n diag(f(2 pi j / n)) F_n^H``."""

    kind = "circulant"

    def __init__(self, symbol: TrigPoly, n: int, eigs=None):
        self.symbol = symbol
        self.n = int(n)
        if eigs is None:
            eigs = symbol(TWO_PI * np.arange(self.n) / self.n)
        self.eigs = np.asarray(eigs, dtype=complex)
        self.eigs.setflags(write=False)
        self.real = bool(getattr(symbol, "real", False))

    @property
    def shape(self):
        return (self.n, self.n)

    @property
    def diagonal_value(self) -> complex:
        return complex(self.symbol.coefficient(0))

    def matvec(self, x) -> np.ndarray:
        x = _as_vector(x, self.n)
        return _apply_circulant(self.eigs, x)

    def rmatvec(self, x) -> np.ndarray:
        x = _as_vector(x, self.n)
        return _apply_circulant(np.conj(self.eigs), x)

    def first_column(self) -> np.ndarray:
        # a_{m mod n}, summing aliased coefficients when the degree exceeds n/2
        col = np.zeros(self.n, dtype=complex)
        c = self.symbol.degree
        np.add.at(col, np.arange(-c, c + 1) % self.n, self.symbol.coeffs)
        return col

    def materialize(self) -> np.ndarray:
        _guard(self.n)
        col = self.first_column()
        r = np.arange(self.n)
        return col[(r[:, None] - r[None, :]) % self.n]


class GCirculantOp:
    """g-circulant matrix with entries ``a_{(r - g s) mod n}``."""

    kind = "g-circulant"

    def __init__(self, symbol: TrigPoly, n: int, g: int):
        if g < 1:
            raise ValueError("g must be positive")
        self.symbol = symbol
        self.n = int(n)
        self.g = int(g)
        self._circ = CirculantOp(symbol, self.n)

    @property
    def shape(self):
        return (self.n, self.n)

    def matvec(self, x) -> np.ndarray:
        x = _as_vector(x, self.n)
        u = np.zeros(x.shape, dtype=complex)
        np.add.at(u, (self.g * np.arange(self.n)) % self.n, x)
        return self._circ.matvec(u)

    def materialize(self) -> np.ndarray:
        _guard(self.n)
        col = self._circ.first_column()
        r = np.arange(self.n)
        return col[(r[:, None] - self.g * r[None, :]) % self.n]


class ToeplitzOp:
    """``T_n = [a_{r-s}]`` stored as the coefficient table ``a_{-(n-1)}..a_{n-1}``."""

    kind = "toeplitz"

    def __init__(self, coeffs, n: int):
        self.n = int(n)
        coeffs = np.asarray(coeffs, dtype=complex).ravel()
        if coeffs.size != 2 * self.n - 1:
            raise ValueError(f"Toeplitz table needs {2 * self.n - 1} entries, got {coeffs.size}")
        self.coeffs = coeffs
        self.coeffs.setflags(write=False)
        self.hermitian = np.allclose(coeffs, np.conj(coeffs[::-1]), rtol=0,
                                     atol=1e-14 * max(np.abs(coeffs).max(), 1.0))
        m = transform.next_smooth(2 * self.n - 1)
        col = np.zeros(m, dtype=complex)
        col[:self.n] = coeffs[self.n - 1:]
        col[m - self.n + 1:] = coeffs[:self.n - 1]
        self._embed = m
        self._eigs = np.sqrt(m) * transform.idft(m, col)
        self._eigs_adj = np.sqrt(m) * transform.idft(m, np.conj(np.concatenate([col[:1], col[1:][::-1]])))

    @property
    def shape(self):
        return (self.n, self.n)

    @property
    def diagonal_value(self) -> complex:
        return complex(self.coeffs[self.n - 1])

    def coefficient(self, k):
        k = np.asarray(k, dtype=int)
        inside = np.abs(k) <= self.n - 1
        return np.where(inside, self.coeffs[np.where(inside, k + self.n - 1, 0)], 0.0)

    def _apply(self, eigs, x):
        pad = np.zeros(x.shape[:-1] + (self._embed,), dtype=complex)
        pad[..., :self.n] = x
        return _apply_circulant(eigs, pad)[..., :self.n]

    def matvec(self, x) -> np.ndarray:
        x = _as_vector(x, self.n)
        return self._apply(self._eigs, x)

    def rmatvec(self, x) -> np.ndarray:
        x = _as_vector(x, self.n)
        if self.hermitian:
            return self._apply(self._eigs, x)
        return self._apply(self._eigs_adj, x)

    def materialize(self) -> np.ndarray:
        _guard(self.n)
        r = np.arange(self.n)
        return self.coeffs[(r[:, None] - r[None, :]) + self.n - 1]


class CuttingOp:
    """Selection of entries ``zeta + g*j``, ``j = 0..k_out-1``.

    ``cut`` applies the adjoint of the 0/1 cutting matrix (restriction by
    injection) and ``extend`` the matrix itself (zero filling).
    """

    def __init__(self, n: int, g: int, zeta: int = 0, k_out: int | None = None):
        self.n, self.g, self.zeta = int(n), int(g), int(zeta)
        if k_out is None:
            k_out = (self.n - 2 * self.zeta - 1) // self.g + 1
        self.k_out = int(k_out)
        if self.k_out < 1 or self.zeta + self.g * (self.k_out - 1) > self.n - 1:
            raise ValueError(f"cutting n={n}, g={g}, zeta={zeta} leaves no coarse entries")
        self.indices = self.zeta + self.g * np.arange(self.k_out)

    @classmethod
    def circulant(cls, n: int, g: int) -> "CuttingOp":
        if n % g:
            raise ValueError(f"n={n} is not divisible by g={g}")
        return cls(n, g, 0, n // g)

    @classmethod
    def toeplitz(cls, n: int, g: int, zeta: int) -> "CuttingOp":
        """Cut leaving ``zeta`` unselected entries at both ends."""
        if (n - 2 * zeta - 1) % g:
            raise ValueError(f"n - 2*zeta - 1 = {n - 2 * zeta - 1} is not divisible by g={g}")
        return cls(n, g, zeta)

    def cut(self, x) -> np.ndarray:
        x = _as_vector(x, self.n)
        return x[..., self.indices]

    def extend(self, y) -> np.ndarray:
        y = _as_vector(y, self.k_out)
        out = np.zeros(y.shape[:-1] + (self.n,), dtype=np.result_type(y, float))
        out[..., self.indices] = y
        return out

    def materialize(self) -> np.ndarray:
        _guard(self.n)
        Z = np.zeros((self.n, self.k_out))
        Z[self.indices, np.arange(self.k_out)] = 1.0
        return Z


def toeplitz_coarse_size(n: int, g: int, zeta: int) -> int:
    """Coarse size ``(n - 2 zeta - 1) / g + 1`` of the symmetric Toeplitz cut."""
    if (n - 2 * zeta - 1) % g:
        raise ValueError(f"n={n} incompatible with g={g} and zeta={zeta}")
    return (n - 2 * zeta - 1) // g + 1


def toeplitz_size_offset(g: int, zeta: int) -> int:
    """Offset ``xi`` such that sizes ``g**a - xi`` map to ``g**(a-1) - xi``."""
    num = 2 * zeta + 1 - g
    if num % (g - 1):
        raise ValueError(f"no recursive size family for g={g}, zeta={zeta}")
    return num // (g - 1)


def circulant_from_symbol(f: TrigPoly, n: int) -> CirculantOp:
    if n < 2 * f.degree + 1:
        raise ValueError(f"n={n} too small for a symbol of degree {f.degree}")
    return CirculantOp(f, n)


def gcirculant_from_symbol(f: TrigPoly, n: int, g: int) -> GCirculantOp:
    return GCirculantOp(f, n, g)


def toeplitz_from_symbol(coeff_rule, n: int) -> ToeplitzOp:
    """Toeplitz matrix from a symbol (anything with ``coefficient``) or a callable rule."""
    k = np.arange(-(n - 1), n)
    rule = coeff_rule.coefficient if hasattr(coeff_rule, "coefficient") else coeff_rule
    return ToeplitzOp(np.asarray(rule(k), dtype=complex), n)


def matvec(op, x) -> np.ndarray:
    return op.matvec(x)


def cut(op: CuttingOp, x) -> np.ndarray:
    return op.cut(x)


def extend(op: CuttingOp, y) -> np.ndarray:
    return op.extend(y)


def materialize(op) -> np.ndarray:
    return op.materialize()


def toeplitz_galerkin_coeffs(A: ToeplitzOp, p: TrigPoly, g: int, zeta: int) -> np.ndarray:
    """Coefficient table of ``Zt^H T(p)^H T(f) T(p) Zt``.

    The entries are ``b_j = h_{g j}`` with ``h`` the coefficients of ``f |p|^2``;
    only ``|g j| <= n - 1 - 2 deg(p)`` is needed, which the table of ``A`` covers.
    """
    n = A.n
    k = toeplitz_coarse_size(n, g, zeta)
    q = mod_square(p)
    shifts = np.arange(-q.degree, q.degree + 1)
    m = g * np.arange(-(k - 1), k)
    if k > 1 and np.abs(m).max() + q.degree > n - 1:
        raise ValueError("Toeplitz table too short for the requested coarse size")
    vals = A.coefficient(m[:, None] - shifts[None, :]) @ q.coeffs
    return vals


def galerkin_coarse(kind: str, f, p: TrigPoly, g: int, n: int, A=None, zeta: int | None = None):
    """Coarse operator and coarse symbol for one level.

    Returns ``(op, f_hat, cutting)``.  No matrix products are formed: the
    circulant case uses the decimated symbol, the Toeplitz case the decimated
    coefficient table (exact also for non-polynomial symbols).
    """
    f_hat = coarse_symbol(f, p, g)
    if kind == "circulant":
        cutting = CuttingOp.circulant(n, g)
        k = n // g
        op = CirculantOp(f_hat, k) if isinstance(f_hat, TrigPoly) else None
        if op is None:
            raise ValueError("circulant levels need polynomial symbols")
        return op, f_hat, cutting
    if kind == "toeplitz":
        if zeta is None:
            zeta = p.degree
        if A is None:
            A = toeplitz_from_symbol(f, n)
        cutting = CuttingOp.toeplitz(n, g, zeta)
        coeffs = toeplitz_galerkin_coeffs(A, p, g, zeta)
        return ToeplitzOp(coeffs, cutting.k_out), f_hat, cutting
    raise ValueError(f"unknown kind {kind!r}")
