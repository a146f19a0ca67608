"""Two-grid and theta-recursive multigrid cycles built from symbols.

The hierarchy is formed entirely at the symbol level: every coarse operator
is ``C_k(f_hat)`` (circulant) or the decimated Toeplitz table, and every
projector is ``P_i Z_i`` with ``P_i`` generated by a projector symbol that
vanishes at the mirror points of the current zeros.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from . import transform
from .structmat import (CirculantOp, CuttingOp, ToeplitzOp, galerkin_coarse,
                        toeplitz_coarse_size, toeplitz_from_symbol)
from .symbol import (TWO_PI, SymbolZero, TrigPoly, angle_distance, check_tgm_conditions,
                     mean_coefficient, noise_floor, projector_symbol,
                     relocate_zeros, sup_norm, verify_zero)

log = logging.getLogger(__name__)

SINGULAR_RTOL = 1e-13
DIVERGENCE_FACTOR = 1e6


class HierarchyError(ValueError):
    """Raised when a level violates the two-grid conditions."""


@dataclass(frozen=True)
class Smoother:
    """One smoothing iteration type.

    ``richardson``: ``x += omega (b - A x)`` with ``omega = scale / ||f_i||_inf``.
    ``jacobi``: ``x += omega D^{-1} (b - A x)``, ``D = a_0 I``,
    ``omega = scale * a_0 / ||f_i||_inf``.
    ``cg``: conjugate gradient steps restarted at every call.
    """

    kind: str = "richardson"
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("richardson", "jacobi", "cg"):
            raise ValueError(f"unknown smoother {self.kind!r}")
        if self.kind == "richardson" and not 0.0 < self.scale < 2.0:
            raise ValueError("Richardson needs 0 < omega * ||f||_inf < 2")
        # the Jacobi step size scale/||f|| may reach the bound 2/||f||:
        # Toeplitz spectra stay strictly below ||f||_inf
        if self.kind == "jacobi" and not 0.0 < self.scale <= 2.0:
            raise ValueError("damped Jacobi needs 0 < omega * ||f||_inf / a_0 <= 2")


@dataclass(frozen=True)
class CycleSpec:
    theta: int = 1
    nu_pre: int = 1
    nu_post: int = 1
    pre: Smoother = Smoother("richardson")
    post: Smoother = Smoother("cg")

    def __post_init__(self):
        if self.theta < 1:
            raise ValueError("theta must be >= 1")
        if self.nu_pre < 0 or self.nu_post < 0:
            raise ValueError("smoothing step counts must be nonnegative")

    @property
    def level_cost(self) -> int:
        """Work units per visit of a non-coarsest level, in units of ``n_i``.

        One unit per smoothing step, one for the residual, one for the transfer
        pair, plus one per CG call for its initial residual.
        """
        extra = sum(1 for sm, nu in ((self.pre, self.nu_pre), (self.post, self.nu_post))
                    if sm.kind == "cg" and nu > 0)
        return self.nu_pre + self.nu_post + 2 + extra


@dataclass
class Level:
    n: int
    symbol: object
    zeros: list
    A: object
    sup: float
    a0: float
    p: TrigPoly | None = None
    P: object = None
    cutting: CuttingOp | None = None
    conditions: object = None

    def restrict(self, d):
        return self.cutting.cut(self.P.rmatvec(d))

    def prolong(self, y):
        return self.P.matvec(self.cutting.extend(y))


@dataclass
class Hierarchy:
    levels: list
    kind: str
    g: int
    _coarse_solver: Callable = field(default=None, repr=False)

    @property
    def sizes(self) -> list[int]:
        return [lv.n for lv in self.levels]

    def __len__(self):
        return len(self.levels)

    def coarse_solve(self, b):
        return self._coarse_solver(b)


@dataclass
class WorkCounter:
    units: float = 0.0
    coarse_solves: int = 0
    calls: dict = field(default_factory=dict)

    def add(self, amount: float):
        self.units += amount


@dataclass
class SolveReport:
    iterations: int
    rel_residual_history: list
    converged: bool
    work_units: float
    diverged: bool = False
    x: np.ndarray | None = field(default=None, repr=False)
    bound_info: object = None

    @property
    def final_rel_residual(self) -> float:
        return self.rel_residual_history[-1] if self.rel_residual_history else float("nan")


@dataclass(frozen=True)
class TgmBound:
    alpha_post: float
    gamma: float
    h: float
    z: float

    @property
    def rho(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.alpha_post / self.gamma))


def _make_coarse_solver(level: Level) -> Callable:
    A = level.A
    if isinstance(A, CirculantOp):
        eigs = A.eigs
        tiny = np.abs(eigs) <= SINGULAR_RTOL * np.abs(eigs).max()
        inv = np.where(tiny, 0.0, 1.0 / np.where(tiny, 1.0, eigs))
        return lambda b: _spectral(inv, b)
    dense = A.materialize()
    factor = scipy.linalg.cho_factor(dense)
    return lambda b: scipy.linalg.cho_solve(factor, b)


def _spectral(inv_eigs, b):
    p = transform.plan(inv_eigs.shape[0])
    return p.forward(inv_eigs * p.inverse(b))


def _resolve_projector(p_rule, index: int, zeros, symbol, g: int) -> TrigPoly:
    if p_rule is None:
        return projector_symbol(zeros, g)
    if isinstance(p_rule, TrigPoly):
        return p_rule
    return p_rule(index, zeros, symbol)


def build_hierarchy(f0, zeros0: Sequence[SymbolZero], kind: str, n0: int, g: int,
                    p_rule=None, coarsest_threshold: int = 27, max_levels: int | None = None,
                    check: bool = True) -> Hierarchy:
    """Symbol-level Galerkin hierarchy.

    Args:
        f0: fine symbol (:class:`TrigPoly`; Toeplitz levels also accept a
            :class:`~symbolmg.symbol.FourierSeries`).
        zeros0: the zeros of ``f0``; they are verified, not searched for.
        kind: ``"circulant"`` or ``"toeplitz"``.
        n0: fine size.
        g: size reduction factor.
        p_rule: ``None`` (build from the zeros at every level), a fixed
            :class:`TrigPoly`, or ``callable(level, zeros, symbol) -> TrigPoly``.
        coarsest_threshold: levels of size ``<= threshold`` are solved directly.
        max_levels: cap on the number of levels (2 gives the two-grid method).
        check: verify zeros and two-grid conditions at every coarsened level.
    """
    if kind not in ("circulant", "toeplitz"):
        raise ValueError(f"unknown kind {kind!r}")
    if g < 2:
        raise ValueError(f"invalid coarsening factor g={g}")
    zeros = list(zeros0)
    if check:
        for z in zeros:
            verify_zero(f0, z)
    if kind == "circulant":
        A = CirculantOp(f0, n0)
    else:
        A = toeplitz_from_symbol(f0, n0)

    levels = []
    symbol = f0
    n = n0
    while True:
        level = Level(n=n, symbol=symbol, zeros=zeros, A=A, sup=sup_norm(symbol),
                      a0=float(np.real(A.diagonal_value)))
        levels.append(level)
        at_cap = max_levels is not None and len(levels) >= max_levels
        if n <= coarsest_threshold or at_cap:
            break
        p = _resolve_projector(p_rule, len(levels) - 1, zeros, symbol, g)
        if check:
            report = check_tgm_conditions(symbol, zeros, p, g)
            if not report.ok:
                raise HierarchyError(f"level {len(levels) - 1} (n={n}): {report.describe()}")
            level.conditions = report
        if kind == "circulant":
            A_c, f_hat, cutting = galerkin_coarse("circulant", symbol, p, g, n)
            P = CirculantOp(p, n)
        else:
            A_c, f_hat, cutting = galerkin_coarse("toeplitz", symbol, p, g, n, A=A, zeta=p.degree)
            P = toeplitz_from_symbol(p, n)
        level.p, level.P, level.cutting = p, P, cutting
        zeros = relocate_zeros(zeros, g)
        symbol, A, n = f_hat, A_c, cutting.k_out
    hier = Hierarchy(levels=levels, kind=kind, g=g)
    hier._coarse_solver = _make_coarse_solver(levels[-1])
    log.debug("hierarchy %s sizes %s", kind, hier.sizes)
    return hier


def _omega(level: Level, smoother: Smoother) -> float:
    if smoother.kind == "richardson":
        return smoother.scale / level.sup
    return smoother.scale * level.a0 / level.sup


def smooth(A, x, b, smoother: Smoother, steps: int, omega: float | None = None,
           counter: WorkCounter | None = None, weight: float = 1.0):
    """Apply ``steps`` smoothing iterations to ``A x = b`` starting from ``x``.

    For Richardson and Jacobi ``omega`` is the actual step parameter (for
    Jacobi the step is ``omega / a_0`` times the residual).
    """
    if steps <= 0:
        return x
    if smoother.kind == "cg":
        return _cg(A, x, b, steps, counter, weight)
    if omega is None:
        raise ValueError("stationary smoothers need omega")
    step = omega
    if smoother.kind == "jacobi":
        step = omega / float(np.real(A.diagonal_value))
    x = np.array(x, dtype=complex)
    for _ in range(steps):
        x = x + step * (b - A.matvec(x))
        if counter is not None:
            counter.add(weight)
    return x


def _cg(A, x, b, steps, counter=None, weight=1.0):
    x = np.array(x, dtype=complex)
    r = b - A.matvec(x)
    d = r.copy()
    rr = np.vdot(r, r).real
    for _ in range(steps):
        if rr == 0.0:
            break
        Ad = A.matvec(d)
        dAd = np.vdot(d, Ad).real
        if dAd <= 0.0:
            break
        a = rr / dAd
        x = x + a * d
        r = r - a * Ad
        rr_new = np.vdot(r, r).real
        d = r + (rr_new / rr) * d
        rr = rr_new
    if counter is not None:
        counter.add(weight * (steps + 1))
    return x


def mgm_cycle(hier: Hierarchy, i: int, x, b, cycle: CycleSpec,
              counter: WorkCounter | None = None):
    """One multigrid cycle at level ``i`` (returns the new iterate)."""
    level = hier.levels[i]
    weight = level.n / hier.levels[0].n
    if i == len(hier.levels) - 1:
        if counter is not None:
            counter.coarse_solves += 1
            # a direct coarse solve is priced like a full level visit
            counter.add(cycle.level_cost * weight)
        return hier.coarse_solve(b)
    A = level.A
    x = smooth(A, x, b, cycle.pre, cycle.nu_pre, _omega(level, cycle.pre), counter, weight)
    d = A.matvec(x) - b
    d_c = level.restrict(d)
    if counter is not None:
        counter.add(2 * weight)  # residual + transfer pair
    y = np.zeros(d_c.shape, dtype=complex)
    for _ in range(cycle.theta):
        y = mgm_cycle(hier, i + 1, y, d_c, cycle, counter)
    x = x - level.prolong(y)
    x = smooth(A, x, b, cycle.post, cycle.nu_post, _omega(level, cycle.post), counter, weight)
    return x


def tgm_step(hier: Hierarchy, x, b, cycle: CycleSpec, counter: WorkCounter | None = None):
    """Two-grid step on the two finest levels, with an exact coarse solve."""
    level = hier.levels[0]
    A = level.A
    x = smooth(A, x, b, cycle.pre, cycle.nu_pre, _omega(level, cycle.pre), counter)
    d_c = level.restrict(A.matvec(x) - b)
    if len(hier.levels) != 2:
        raise ValueError("tgm_step needs a two-level hierarchy")
    y = hier.coarse_solve(d_c)
    x = x - level.prolong(y)
    return smooth(A, x, b, cycle.post, cycle.nu_post, _omega(level, cycle.post), counter)


def solve(hier: Hierarchy, b, cycle: CycleSpec, tol: float | None = 1e-7, max_iter: int = 500,
          x0=None) -> SolveReport:
    """Iterate cycles until ``||r_q|| / ||r_0|| <= tol``.

    With ``tol=None`` exactly ``max_iter`` cycles are run (residual histories).
    """
    if tol is not None and tol <= 0:
        raise ValueError("tol must be positive")
    A = hier.levels[0].A
    b = np.asarray(b, dtype=complex)
    x = np.zeros(A.n, dtype=complex) if x0 is None else np.array(x0, dtype=complex)
    counter = WorkCounter()
    r0 = np.linalg.norm(b - A.matvec(x))
    history = [1.0]
    if r0 == 0.0:
        return SolveReport(0, history, True, 0.0, x=x)
    converged = diverged = False
    q = 0
    while q < max_iter:
        if len(hier.levels) == 1:
            x = hier.coarse_solve(b)
        else:
            x = mgm_cycle(hier, 0, x, b, cycle, counter)
        q += 1
        rel = np.linalg.norm(b - A.matvec(x)) / r0
        counter.add(1.0)
        history.append(float(rel))
        if tol is not None and rel <= tol:
            converged = True
            break
        if not np.isfinite(rel) or rel > DIVERGENCE_FACTOR:
            log.warning("iteration %d: relative residual %.3e, stopping", q, rel)
            diverged = True
            break
    return SolveReport(q, history, converged, counter.units, diverged=diverged, x=x)


def tgm_bound(f, p: TrigPoly, g: int, omega: float | None = None, zeros=(),
              samples: int = 1 << 15) -> TgmBound:
    """Smoothing and approximation constants of the two-grid method.

    ``alpha = a0 omega (2 - omega ||f||)`` (``omega = 1/||f||`` by default) and
    ``gamma = g (g-1) a0 h z`` with ``h = ||1 / sum_{Omega(x)} |p|^2||_inf`` and
    ``z = sup |p(y)|^2 / f(x)`` over the mirror points ``y`` of ``x``.
    """
    fsup = sup_norm(f)
    a0 = mean_coefficient(f)
    if omega is None:
        omega = 1.0 / fsup
    if not 0.0 < omega < 2.0 / fsup:
        raise ValueError("omega outside (0, 2/||f||_inf)")
    alpha = a0 * omega * (2.0 - omega * fsup)

    report = check_tgm_conditions(f, zeros, p, g) if zeros else None
    if report is not None and not report.ok:
        raise HierarchyError(f"bound undefined: {report.describe()}")

    x = TWO_PI * np.arange(samples) / samples
    probes = [x]
    for zz in zeros:
        probes.append(zz.location + np.concatenate([10.0 ** -np.arange(1, 5), -(10.0 ** -np.arange(1, 5))]))
    x = np.concatenate(probes)
    if zeros:
        near = np.min([angle_distance(x, zz.location) for zz in zeros], axis=0)
        x = x[near > 1e-6]
    fx = np.real(f(x))
    # near a zero the ratio is represented by its values above the noise floor
    keep = fx > noise_floor(f)
    x, fx = x[keep], fx[keep]
    orbit = np.stack([np.abs(p(x + TWO_PI * k / g)) ** 2 for k in range(g)])
    h = float(np.max(1.0 / orbit.sum(axis=0)))
    with np.errstate(divide="ignore"):
        z = float(np.max(orbit[1:] / fx))
    gamma = g * (g - 1) * a0 * h * z
    return TgmBound(alpha_post=alpha, gamma=gamma, h=h, z=z)


@dataclass(frozen=True)
class CostPrediction:
    regime: str
    value: float
    finite_value: float | None = None


def work_model(g: int, theta: int, levels: int | None = None, c: float = 1.0,
               n: float = 1.0) -> CostPrediction:
    """Work of one cycle: ``g/(g-theta) c n`` for ``theta < g``, ``O(n log n)`` for ``theta = g``.

    With ``levels`` the finite geometric sum ``c n sum_{i<levels} (theta/g)^i``
    is returned alongside.
    """
    if theta > g:
        raise ValueError(f"theta={theta} > g={g}: the cycle cost is superlinear beyond n log n")
    finite = None
    if levels is not None:
        finite = c * n * sum((theta / g) ** i for i in range(levels))
    if theta < g:
        return CostPrediction("linear", g / (g - theta) * c * n, finite)
    depth = levels if levels is not None else math.log(max(n, 1.0), g)
    return CostPrediction("nlogn", c * n * depth, finite)
