"""Dense brute-force checks of the structural identities and inequalities.

Everything here builds explicit matrices and is meant for small sizes only.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg

from . import transform
from .structmat import (CirculantOp, CuttingOp, galerkin_coarse, toeplitz_from_symbol)
from .symbol import TrigPoly, mean_coefficient

HERMITIAN_TOL = 1e-12


class RankDeficientError(ValueError):
    pass


def fourier_matrix(n: int) -> np.ndarray:
    """``F_n`` with kernel ``exp(-2 pi i j k / n) / sqrt(n)``."""
    j = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)


def _check_hermitian(A: np.ndarray) -> None:
    scale = max(np.abs(A).max(), 1.0)
    if np.abs(A - A.conj().T).max() > HERMITIAN_TOL * scale:
        raise ValueError("matrix is not Hermitian")


def dense_solve(A, b) -> np.ndarray:
    """Solve a Hermitian positive definite system by Cholesky."""
    A = np.asarray(A)
    _check_hermitian(A)
    lam_min, _ = extreme_eigs(A)
    if lam_min <= 0:
        raise ValueError(f"matrix is not positive definite (min eig {lam_min:.3e})")
    factor = scipy.linalg.cho_factor(A)
    return scipy.linalg.cho_solve(factor, np.asarray(b))


def extreme_eigs(A) -> tuple[float, float]:
    """Smallest and largest eigenvalue of a Hermitian matrix."""
    A = np.asarray(A)
    _check_hermitian(A)
    w = np.linalg.eigvalsh(0.5 * (A + A.conj().T))
    return float(w[0]), float(w[-1])


def verify_fourier_cutting(n: int, g: int) -> float:
    """``max |F_n^H Z - I_{n,g} F_k^H / sqrt(g)|``."""
    if n % g:
        raise ValueError(f"g={g} does not divide n={n}")
    k = n // g
    Z = CuttingOp.circulant(n, g).materialize()
    lhs = fourier_matrix(n).conj().T @ Z
    stack = np.vstack([np.eye(k)] * g)
    rhs = stack @ fourier_matrix(k).conj().T / np.sqrt(g)
    return float(np.abs(lhs - rhs).max())


def verify_fourier_cutting_fast(n: int, g: int) -> float:
    """Same identity checked column by column through the fast transform."""
    if n % g:
        raise ValueError(f"g={g} does not divide n={n}")
    k = n // g
    cutting = CuttingOp.circulant(n, g)
    eye_k = np.eye(k)
    lhs = transform.idft(n, cutting.extend(eye_k))
    rhs = np.tile(transform.idft(k, eye_k), g) / np.sqrt(g)
    return float(np.abs(lhs - rhs).max())


def projector_matrix(kind: str, p: TrigPoly, g: int, n: int, zeta: int | None = None) -> np.ndarray:
    if kind == "circulant":
        return CirculantOp(p, n).materialize() @ CuttingOp.circulant(n, g).materialize()
    if zeta is None:
        zeta = p.degree
    return (toeplitz_from_symbol(p, n).materialize()
            @ CuttingOp.toeplitz(n, g, zeta).materialize())


def verify_galerkin(kind: str, f, p: TrigPoly, g: int, n: int) -> float:
    """Deviation between the dense triple product and the symbol-level coarse operator."""
    if kind == "circulant":
        A = CirculantOp(f, n).materialize()
        op, _, _ = galerkin_coarse("circulant", f, p, g, n)
    else:
        Aop = toeplitz_from_symbol(f, n)
        A = Aop.materialize()
        op, _, _ = galerkin_coarse("toeplitz", f, p, g, n, A=Aop)
    Pz = projector_matrix(kind, p, g, n)
    dense = Pz.conj().T @ A @ Pz
    return float(np.abs(dense - op.materialize()).max())


def orthonormal_basis(M: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Modified Gram-Schmidt with one reorthogonalization pass."""
    M = np.array(M, dtype=complex)
    Q = np.zeros_like(M)
    for j in range(M.shape[1]):
        v = M[:, j].copy()
        norm0 = np.linalg.norm(v)
        for _ in range(2):
            for i in range(j):
                v -= np.vdot(Q[:, i], v) * Q[:, i]
        norm = np.linalg.norm(v)
        if norm0 == 0.0 or norm <= rtol * norm0:
            raise RankDeficientError(f"column {j} is (numerically) dependent on the previous ones")
        Q[:, j] = v / norm
    return Q


def complement_projector(Pz: np.ndarray) -> np.ndarray:
    """``W = I - Pz (Pz^H Pz)^{-1} Pz^H`` built from an orthonormal basis."""
    Q = orthonormal_basis(Pz)
    return np.eye(Pz.shape[0]) - Q @ Q.conj().T


def verify_approx_inequality(f: TrigPoly, p: TrigPoly, g: int, n: int, gamma: float) -> float:
    """Minimum eigenvalue of ``(gamma / a0) C_n(f) - W_n(p)`` (nonnegative when the bound holds)."""
    A = CirculantOp(f, n).materialize()
    W = complement_projector(projector_matrix("circulant", p, g, n))
    a0 = mean_coefficient(f)
    lam_min, _ = extreme_eigs(gamma / a0 * A - W)
    return lam_min


def richardson_matrix(A: np.ndarray, omega: float) -> np.ndarray:
    return np.eye(A.shape[0]) - omega * A


def smoothing_slack(A: np.ndarray, omega: float, alpha: float, x: np.ndarray) -> np.ndarray:
    """``||x||_A^2 - alpha ||x||_{A D^-1 A}^2 - ||V x||_A^2`` per column of ``x``."""
    D_inv = 1.0 / np.real(np.diag(A))
    V = richardson_matrix(A, omega)
    Vx = V @ x
    Ax = A @ x
    lhs = np.real(np.sum(np.conj(Vx) * (A @ Vx), axis=0))
    rhs = (np.real(np.sum(np.conj(x) * Ax, axis=0))
           - alpha * np.real(np.sum(np.conj(Ax) * (D_inv[:, None] * Ax), axis=0)))
    return rhs - lhs


def two_grid_matrix(A: np.ndarray, Pz: np.ndarray, post: np.ndarray | None = None,
                    pre: np.ndarray | None = None) -> np.ndarray:
    """``V_post (I - Pz (Pz^H A Pz)^+ Pz^H A) V_pre``."""
    n = A.shape[0]
    Ac = Pz.conj().T @ A @ Pz
    cgc = np.eye(n) - Pz @ np.linalg.pinv(Ac, rcond=1e-12, hermitian=True) @ Pz.conj().T @ A
    out = cgc
    if pre is not None:
        out = out @ pre
    if post is not None:
        out = post @ out
    return out


def energy_norm(A: np.ndarray, M: np.ndarray, rtol: float = 1e-12) -> float:
    """``||M||_A`` restricted to ``range(A)`` (a seminorm when ``A`` is singular)."""
    w, U = np.linalg.eigh(0.5 * (A + A.conj().T))
    keep = w > rtol * w.max()
    Ur, wr = U[:, keep], w[keep]
    B = (np.sqrt(wr)[:, None] * (Ur.conj().T @ M @ Ur)) / np.sqrt(wr)[None, :]
    return float(np.linalg.norm(B, 2))
