"""Dense verification suites run by ``check`` and by the acceptance tests.

Each suite returns a list of :class:`CheckResult`; a suite passes when every
entry does.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .. import oracle
from ..multigrid import tgm_bound
from ..structmat import CirculantOp
from ..symbol import (SymbolZero, TrigPoly, check_tgm_conditions, coarse_symbol,
                      mean_coefficient, projector_symbol, relocate_zeros,
                      sup_norm, verify_zero, x_squared)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float
    ok: bool

    def line(self) -> str:
        status = "ok" if self.ok else "VIOLATED"
        return f"{status:8s} {self.name}: {self.value:.3e} (threshold {self.threshold:.1e})"


def _upper(name, value, threshold):
    return CheckResult(name, float(value), threshold, bool(value <= threshold))


def _lower(name, value, threshold):
    return CheckResult(name, float(value), threshold, bool(value >= threshold))


def symbol_set() -> dict:
    """Trigonometric-polynomial symbols with their zeros, as used by the experiments."""
    c = TrigPoly.cos_factor
    two_zeros = [SymbolZero(0.0, 2), SymbolZero(np.pi, 2)]
    return {
        "two-zeros": (c(0.0) * c(np.pi), two_zeros),
        "order-4": (c(0.0) * c(np.pi, 2), [SymbolZero(0.0, 2), SymbolZero(np.pi, 4)]),
        "single-zero": (c(0.0), [SymbolZero(0.0, 2)]),
        "zero-pi/3": (c(np.pi / 3), [SymbolZero(np.pi / 3, 2)]),
        "cos2-cos4": (TrigPoly.from_cosines(6.0, [0.0, -4.0, 0.0, -2.0]), two_zeros),
    }


def fourier_cutting_suite(tol: float = 1e-12) -> list[CheckResult]:
    out = []
    for n in (6, 9, 12, 27, 81):
        for g in (2, 3):
            if n % g:
                continue
            out.append(_upper(f"fourier-cutting n={n} g={g}", oracle.verify_fourier_cutting(n, g), tol))
            out.append(_upper(f"fourier-cutting fast n={n} g={g}",
                              oracle.verify_fourier_cutting_fast(n, g), tol))
    return out


def galerkin_suite(tol: float = 1e-10, g: int = 3) -> list[CheckResult]:
    out = []
    symbols = symbol_set()
    for name, (f, zeros) in symbols.items():
        p = projector_symbol(zeros, g)
        out.append(_upper(f"galerkin circulant {name} n=27", oracle.verify_galerkin("circulant", f, p, g, 27), tol))
    for name, n in (("two-zeros", 78), ("single-zero", 80), ("zero-pi/3", 80)):
        f, zeros = symbols[name]
        p = projector_symbol(zeros, g)
        out.append(_upper(f"galerkin toeplitz {name} n={n}", oracle.verify_galerkin("toeplitz", f, p, g, n), tol))
    f, zeros = x_squared(), [SymbolZero(0.0, 2)]
    p = projector_symbol(zeros, g)
    out.append(_upper("galerkin toeplitz x^2 n=80", oracle.verify_galerkin("toeplitz", f, p, g, 80), tol))
    out.extend(coarse_invariants_suite(g))
    return out


def coarse_invariants_suite(g: int = 3) -> list[CheckResult]:
    """Degree bound of the coarse symbol and relocation of its zeros (with orders)."""
    out = []
    cases = dict(symbol_set())
    cases["x^2"] = (x_squared(), [SymbolZero(0.0, 2)])
    for name, (f, zeros) in cases.items():
        p = projector_symbol(zeros, g)
        f_hat = coarse_symbol(f, p, g)
        if isinstance(f, TrigPoly):
            bound = (f.degree + 2 * p.degree) // g
            out.append(_upper(f"coarse degree {name}", f_hat.degree, bound))
        relocated = relocate_zeros(zeros, g)
        for z in relocated:
            try:
                verify_zero(f_hat, z)
                out.append(CheckResult(f"relocated zero {name} at {z.location:.4f}", 0.0, 0.0, True))
            except ValueError:
                out.append(CheckResult(f"relocated zero {name} at {z.location:.4f}", 1.0, 0.0, False))
        # the coarse symbol stays nonnegative
        x = 2 * np.pi * np.arange(2048) / 2048
        low = float(np.min(np.real(f_hat(x))))
        out.append(_lower(f"coarse nonnegative {name}", low, -1e-10 * sup_norm(f_hat)))
    return out


def approx_suite(tol: float = 1e-8, g: int = 3) -> list[CheckResult]:
    """Approximation inequality and two-grid norm bound (dense, n = 27 and 81)."""
    out = []
    for name, (f, zeros) in symbol_set().items():
        p = projector_symbol(zeros, g)
        bound = tgm_bound(f, p, g, zeros=zeros)
        for n in (27, 81):
            out.append(_lower(f"approximation {name} n={n}",
                              oracle.verify_approx_inequality(f, p, g, n, bound.gamma), -tol))
            A = CirculantOp(f, n).materialize()
            Pz = oracle.projector_matrix("circulant", p, g, n)
            post = oracle.richardson_matrix(A, 1.0 / sup_norm(f))
            norm = oracle.energy_norm(A, oracle.two_grid_matrix(A, Pz, post=post))
            out.append(_upper(f"two-grid norm {name} n={n}", norm - bound.rho, tol))
    return out


def smoothing_suite(tol: float = 1e-10, n: int = 81, vectors: int = 100,
                    seed: int = 42) -> list[CheckResult]:
    out = []
    rng = np.random.default_rng(seed)
    for name, (f, _) in symbol_set().items():
        fsup = sup_norm(f)
        omega = 1.0 / fsup
        alpha = mean_coefficient(f) * omega * (2.0 - omega * fsup)
        A = CirculantOp(f, n).materialize()
        x = rng.standard_normal((n, vectors)) + 1j * rng.standard_normal((n, vectors))
        slack = oracle.smoothing_slack(A, omega, alpha, x)
        scale = np.real(np.sum(np.conj(x) * (A @ x), axis=0))
        out.append(_lower(f"smoothing {name} n={n}", float(np.min(slack / np.maximum(scale, 1.0))), -tol))
    return out


def candidate_projectors(max_degree: int = 6, grid: int = 8):
    """Products of ``2 - 2cos(x - y)`` factors with roots on ``2 pi j / grid`` (plus constants)."""
    roots = [2 * np.pi * j / grid for j in range(grid)]
    yield TrigPoly.constant(1.0)
    for d in range(1, max_degree + 1):
        for combo in itertools.combinations_with_replacement(roots, d):
            p = TrigPoly.constant(1.0)
            for y in combo:
                p = p * TrigPoly.cos_factor(y)
            yield p


def mirror_pathology_suite() -> list[CheckResult]:
    """g = 2 fails for every candidate projector; g = 3 succeeds with the built one."""
    f, zeros = symbol_set()["two-zeros"]
    accepted = 0
    total = 0
    for p in candidate_projectors():
        total += 1
        if check_tgm_conditions(f, zeros, p, 2, samples=512).ok:
            accepted += 1
    out = [_upper(f"g=2 candidates accepted ({total} tried)", accepted, 0)]
    ok3 = check_tgm_conditions(f, zeros, projector_symbol(zeros, 3), 3).ok
    out.append(CheckResult("g=3 built projector accepted", float(ok3), 1.0, ok3))
    return out


SUITES = {
    "lemma1": fourier_cutting_suite,
    "galerkin": galerkin_suite,
    "approx": approx_suite,
    "smoothing": smoothing_suite,
}


def run_suites(names) -> list[CheckResult]:
    results = []
    for name in names:
        results.extend(SUITES[name]())
    return results


__all__ = ["CheckResult", "SUITES", "run_suites", "symbol_set", "candidate_projectors",
           "mirror_pathology_suite"]
