"""Trigonometric polynomials and the symbol calculus used to build grid transfers.

A symbol ``f(x) = sum_{|j| <= c} a_j exp(i j x)`` is stored as its centred
coefficient vector.  Besides the polynomial class :class:`TrigPoly` there is
:class:`FourierSeries` for symbols known through a closed form plus an
analytic coefficient rule (for example ``f(x) = x**2``), which only ever reach
the solver as finite Toeplitz coefficient tables.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

TWO_PI = 2.0 * np.pi
POINT_TOL = 1e-12

SUP_SAMPLES = 8192
COND8_SAMPLES = 4096
COND7_STEPS = tuple(10.0 ** -t for t in range(1, 7))
COND7_GROWTH = 1e3
# values below NOISE_FACTOR * eps * sum|a_j| are indistinguishable from zero
NOISE_FACTOR = 1e3


def normalize_angle(x):
    """Reduce angles into ``[0, 2*pi)``."""
    y = np.mod(x, TWO_PI)
    if np.ndim(y) == 0:
        y = float(y)
        return 0.0 if TWO_PI - y < POINT_TOL else y
    y = np.where(TWO_PI - y < POINT_TOL, 0.0, y)
    return y


def angle_distance(a, b):
    """Distance between two angles on the circle."""
    d = np.mod(np.asarray(a) - np.asarray(b), TWO_PI)
    return np.minimum(d, TWO_PI - d)


class TrigPoly:
    """Trigonometric polynomial ``sum_{j=-c}^{c} a_j e^{ijx}``.

    Args:
        coeffs: centred coefficient vector of odd length ``2c+1`` (entry
            ``c + j`` holds ``a_j``) or a mapping ``{j: a_j}``.
        real: declare the represented function real-valued; the Hermitian
            symmetry ``a_{-j} = conj(a_j)`` is then checked.
    """

    __slots__ = ("_coeffs", "degree", "real")

    def __init__(self, coeffs, real: bool = False):
        if isinstance(coeffs, dict):
            c = max((abs(int(j)) for j in coeffs), default=0)
            arr = np.zeros(2 * c + 1, dtype=complex)
            for j, a in coeffs.items():
                arr[c + int(j)] += a
        else:
            arr = np.array(coeffs, dtype=complex).ravel()
            if arr.size % 2 != 1:
                raise ValueError("centred coefficient vector must have odd length")
        self._coeffs = arr
        self._coeffs.setflags(write=False)
        self.degree = (arr.size - 1) // 2
        self.real = bool(real)
        if self.real:
            scale = max(np.abs(arr).sum(), 1.0)
            if np.abs(arr - np.conj(arr[::-1])).max(initial=0.0) > 1e-12 * scale:
                raise ValueError("coefficients are not Hermitian symmetric")

    @classmethod
    def constant(cls, value=1.0) -> "TrigPoly":
        return cls([value], real=np.isreal(value))

    @classmethod
    def from_cosines(cls, a0, cos_coeffs: Sequence = ()) -> "TrigPoly":
        """``a0 + sum_k cos_coeffs[k-1] * cos(k x)``."""
        c = len(cos_coeffs)
        arr = np.zeros(2 * c + 1, dtype=complex)
        arr[c] = a0
        for k, ck in enumerate(cos_coeffs, start=1):
            arr[c + k] = arr[c - k] = ck / 2.0
        return cls(arr, real=True)

    @classmethod
    def cos_factor(cls, shift: float, power: int = 1) -> "TrigPoly":
        """``(2 - 2 cos(x - shift)) ** power``."""
        e = np.exp(-1j * shift)
        base = cls([-np.conj(e), 2.0, -e], real=True)
        out = cls.constant(1.0)
        for _ in range(int(power)):
            out = out * base
        return out

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    def coefficient(self, k):
        """Coefficient ``a_k`` (zero outside ``[-c, c]``); vectorized in ``k``."""
        k = np.asarray(k, dtype=int)
        inside = np.abs(k) <= self.degree
        idx = np.where(inside, k + self.degree, 0)
        return np.where(inside, self._coeffs[idx], 0.0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        j = np.arange(-self.degree, self.degree + 1)
        vals = np.exp(1j * np.multiply.outer(x, j)) @ self._coeffs
        if self.real:
            return vals.real
        return vals

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            return TrigPoly(np.convolve(self._coeffs, other._coeffs),
                            real=self.real and other.real)
        if np.isscalar(other):
            return TrigPoly(self._coeffs * other, real=self.real and np.isreal(other))
        return NotImplemented

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, TrigPoly):
            other = TrigPoly.constant(other)
        c = max(self.degree, other.degree)
        arr = np.zeros(2 * c + 1, dtype=complex)
        arr[c - self.degree:c + self.degree + 1] += self._coeffs
        arr[c - other.degree:c + other.degree + 1] += other._coeffs
        return TrigPoly(arr, real=self.real and other.real)

    def conj(self) -> "TrigPoly":
        """Symbol of the adjoint operator, ``x -> conj(f(x))``."""
        return TrigPoly(np.conj(self._coeffs[::-1]), real=self.real)

    def trim(self, tol: float = 0.0) -> "TrigPoly":
        """Drop outer coefficient pairs whose modulus is ``<= tol``."""
        arr = self._coeffs
        c = self.degree
        while c > 0 and abs(arr[0]) <= tol and abs(arr[-1]) <= tol:
            arr = arr[1:-1]
            c -= 1
        return TrigPoly(arr, real=self.real)

    def abs_sum(self) -> float:
        return float(np.abs(self._coeffs).sum())

    def __repr__(self):
        terms = {j: complex(a) for j, a in zip(range(-self.degree, self.degree + 1), self._coeffs)
                 if abs(a) > 0}
        return f"TrigPoly(degree={self.degree}, real={self.real}, coeffs={terms})"


class FourierSeries:
    """Real symbol given by a pointwise formula and an analytic coefficient rule.

    ``noise`` is the absolute accuracy of ``func``; it plays the role of
    ``eps * sum|a_j|`` for polynomials when deciding that a value is zero.
    """

    real = True

    def __init__(self, func: Callable, coeff_rule: Callable, noise: float = 1e-15,
                 name: str = "series"):
        self._func = func
        self._rule = coeff_rule
        self.noise = noise
        self.name = name

    def __call__(self, x):
        return np.asarray(self._func(np.asarray(x, dtype=float)), dtype=float)

    def coefficient(self, k):
        return np.asarray(self._rule(np.asarray(k, dtype=int)))

    def __repr__(self):
        return f"FourierSeries({self.name})"


def x_squared() -> FourierSeries:
    """The symbol ``x**2`` on ``[-pi, pi]`` extended periodically."""

    def func(x):
        y = np.mod(x + np.pi, TWO_PI) - np.pi
        return y * y

    def rule(k):
        k = np.asarray(k, dtype=float)
        safe = np.where(k == 0, 1.0, k)
        return np.where(k == 0, np.pi ** 2 / 3.0, 2.0 * np.cos(np.pi * k) / safe ** 2)

    return FourierSeries(func, rule, noise=1e-15 * np.pi ** 2, name="x^2")


def noise_floor(f) -> float:
    """Absolute level below which values of ``f`` are roundoff."""
    if isinstance(f, TrigPoly):
        return NOISE_FACTOR * np.finfo(float).eps * max(f.abs_sum(), 1.0)
    return NOISE_FACTOR * getattr(f, "noise", 1e-15)


@dataclass(frozen=True)
class SymbolZero:
    """A zero of a nonnegative symbol.

    ``order`` is the (even) order of the zero; ``beta = order / 2`` is the
    smallest ``i`` with ``|x - x0|^{2i} / f(x)`` bounded and ``exponent`` is
    the power ``ceil(beta / 2)`` of each ``2 - 2cos`` factor of the projector.
    """

    location: float
    order: int = 2

    def __post_init__(self):
        if self.order < 2 or self.order % 2:
            raise ValueError(f"zero order must be an even integer >= 2, got {self.order}")
        object.__setattr__(self, "location", normalize_angle(float(self.location)))

    @property
    def beta(self) -> int:
        return self.order // 2

    @property
    def exponent(self) -> int:
        return math.ceil(self.beta / 2)


@dataclass(frozen=True)
class PointSet:
    points: tuple

    def __post_init__(self):
        pts = tuple(normalize_angle(float(p)) for p in self.points)
        for i in range(len(pts)):
            for j in range(i):
                if angle_distance(pts[i], pts[j]) <= POINT_TOL:
                    raise ValueError("points are not distinct modulo 2*pi")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def contains(self, x, tol: float = 1e-9) -> bool:
        return any(angle_distance(x, p) <= tol for p in self.points)


@dataclass
class ConditionReport:
    """Outcome of the two-grid condition checks for one ``(f, p, g)`` triple."""

    cond_p2f1_ok: list = field(default_factory=list)
    cond_p2f3_min: float = float("nan")
    cond_p2f3_ok: bool = False
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.cond_p2f1_ok) and self.cond_p2f3_ok

    def describe(self) -> str:
        parts = []
        for zero, y, ratio in self.violations:
            parts.append(f"limit condition fails at zero {zero.location:.6g} "
                         f"(mirror {y:.6g}, ratio {ratio:.3g})")
        if not self.cond_p2f3_ok:
            parts.append(f"orbit-sum condition fails (min {self.cond_p2f3_min:.3g})")
        return "; ".join(parts) if parts else "ok"


def eval_symbol(f, x):
    """Evaluate a symbol at ``x`` (scalar or array)."""
    return f(x)


def multiply(f: TrigPoly, g: TrigPoly) -> TrigPoly:
    return f * g


def mod_square(p: TrigPoly) -> TrigPoly:
    """``|p|^2`` as a real trigonometric polynomial."""
    sq = np.convolve(p.coeffs, np.conj(p.coeffs[::-1]))
    sq = 0.5 * (sq + np.conj(sq[::-1]))
    return TrigPoly(sq, real=True)


def omega_set(x0: float, g: int) -> tuple[PointSet, PointSet]:
    """The ``g``-corners of ``x0`` and its ``g``-mirror points."""
    if int(g) != g or g < 2:
        raise ValueError(f"invalid coarsening factor g={g}")
    x0 = normalize_angle(float(x0))
    orbit = [normalize_angle(x0 + TWO_PI * k / g) for k in range(g)]
    return PointSet(tuple(orbit)), PointSet(tuple(orbit[1:]))


def projector_symbol(zeros: Sequence[SymbolZero], g: int) -> TrigPoly:
    """Projector symbol vanishing at the mirror points of every zero.

    Mirror points shared by several zeros contribute one factor with the
    largest required exponent.
    """
    if not zeros:
        raise ValueError("no zeros given: nothing to build a projector from")
    factors: list[list] = []
    for z in zeros:
        _, mirror = omega_set(z.location, g)
        for y in mirror:
            for item in factors:
                if angle_distance(item[0], y) <= 1e-9:
                    item[1] = max(item[1], z.exponent)
                    break
            else:
                factors.append([y, z.exponent])
    p = TrigPoly.constant(1.0)
    for y, e in factors:
        p = p * TrigPoly.cos_factor(y, e)
    return p


def coarse_symbol(f, p: TrigPoly, g: int):
    """Symbol of the Galerkin coarse operator: every ``g``-th coefficient of ``f|p|^2``."""
    if g < 2:
        raise ValueError(f"invalid coarsening factor g={g}")
    q = mod_square(p)
    if isinstance(f, TrigPoly):
        h = f * q
        c = h.degree // g
        idx = h.degree + g * np.arange(-c, c + 1)
        return TrigPoly(h.coeffs[idx], real=f.real)

    shifts = np.arange(-q.degree, q.degree + 1)
    qc = q.coeffs

    def func(x):
        x = np.asarray(x, dtype=float)
        total = np.zeros_like(x)
        for k in range(g):
            y = (x + TWO_PI * k) / g
            total = total + f(y) * q(y)
        return total / g

    def rule(k):
        k = np.asarray(k, dtype=int)
        vals = f.coefficient(g * k[..., None] - shifts) @ qc
        return vals.real if np.isrealobj(f.coefficient(0)) else vals

    noise = getattr(f, "noise", 1e-15) * q.abs_sum()
    return FourierSeries(func, rule, noise=noise, name=f"coarse[{getattr(f, 'name', f)}]")


def relocate_zeros(zeros: Sequence[SymbolZero], g: int) -> list[SymbolZero]:
    """Zeros of the coarse symbol; coincident images keep the largest order."""
    out: list[SymbolZero] = []
    for z in zeros:
        y = normalize_angle(g * z.location)
        for i, w in enumerate(out):
            if angle_distance(w.location, y) <= 1e-9:
                if z.order > w.order:
                    out[i] = SymbolZero(w.location, z.order)
                break
        else:
            out.append(SymbolZero(y, z.order))
    return out


def _golden_max(fun, a, b, iters=80):
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    return max(fc, fd)


def sup_norm(f, samples: int = SUP_SAMPLES) -> float:
    """``max |f|`` over a uniform grid, refined by golden-section search."""
    x = TWO_PI * np.arange(samples) / samples
    vals = np.abs(f(x))
    i = int(np.argmax(vals))
    step = TWO_PI / samples
    refined = _golden_max(lambda t: float(np.abs(f(t))), x[i] - step, x[i] + step)
    return float(max(vals[i], refined))


def mean_coefficient(f) -> float:
    """The constant Fourier coefficient ``a_0`` of a real symbol."""
    if not getattr(f, "real", False):
        raise ValueError("mean_coefficient needs a real-valued symbol")
    return float(np.real(f.coefficient(0)))


def fit_zero_order(f, x0: float, offsets=(3e-2, 1e-2, 3e-3, 1e-3, 1e-4)) -> float:
    """Log-log slope of ``|f(x0 + h)|`` over the offsets well above the noise floor.

    Values within two decades of the noise floor are dropped: coefficient
    roundoff there still bends the slope.
    """
    floor = noise_floor(f)
    hs = np.asarray(offsets, dtype=float)
    vals = np.abs(f(x0 + hs)) + np.abs(f(x0 - hs))
    keep = vals > 100 * floor
    if keep.sum() < 2:
        raise ValueError(f"cannot resolve the zero order at {x0}: values below noise floor")
    slope = np.polyfit(np.log(hs[keep]), np.log(vals[keep]), 1)[0]
    return float(slope)


def verify_zero(f, zero: SymbolZero, order_tol: float = 0.25) -> None:
    """Raise ``ValueError`` unless ``f`` vanishes at ``zero`` with the claimed order."""
    value = abs(complex(np.asarray(f(zero.location))))
    if value > 1e-10 * sup_norm(f):
        raise ValueError(f"symbol does not vanish at {zero.location:.6g} (|f| = {value:.3g})")
    order = fit_zero_order(f, zero.location)
    if abs(order - zero.order) > order_tol:
        raise ValueError(f"zero at {zero.location:.6g} has fitted order {order:.3f}, "
                         f"claimed {zero.order}")


def check_tgm_conditions(f, zeros: Sequence[SymbolZero], p: TrigPoly, g: int,
                         samples: int = COND8_SAMPLES) -> ConditionReport:
    """Check the limit condition at every zero and the orbit-sum condition globally."""
    report = ConditionReport()
    floor = noise_floor(f)
    for z in zeros:
        ok = True
        steps = [h for h in COND7_STEPS if abs(f(z.location + h)) > floor]
        if len(steps) < 2:
            steps = list(COND7_STEPS[:2])
        for k in range(1, g):
            ratios = []
            for h in steps:
                x = z.location + h
                y = x + TWO_PI * k / g
                ratios.append(abs(p(y)) ** 2 / abs(f(x)))
            ratios = np.asarray(ratios)
            nonincreasing = np.all(np.diff(ratios) <= 1e-12 * ratios[:-1] + 1e-300)
            bounded = ratios.max() <= COND7_GROWTH * max(ratios[0], 1e-300)
            if not (nonincreasing or bounded):
                ok = False
                report.violations.append(
                    (z, normalize_angle(z.location + TWO_PI * k / g), float(ratios[-1])))
        report.cond_p2f1_ok.append(ok)

    x = TWO_PI * np.arange(samples) / samples
    total = np.zeros(samples)
    for k in range(g):
        total += np.abs(p(x + TWO_PI * k / g)) ** 2
    report.cond_p2f3_min = float(total.min())
    scale = max(float(total.max()), 1e-300)
    report.cond_p2f3_ok = report.cond_p2f3_min > 1e-10 * scale
    return report
