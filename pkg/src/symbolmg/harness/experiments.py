"""Experiment registry and runner for the iteration-count tables."""
from __future__ import annotations

import dataclasses
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from ..multigrid import CycleSpec, Smoother, build_hierarchy, solve
from ..symbol import SymbolZero, TrigPoly, x_squared

log = logging.getLogger(__name__)

DEFAULT_SEED = 42
MODES = ("TGM", "V", "W")


def build_symbol(desc: dict):
    """Symbol from a plain description.

    ``{"type": "product", "factors": [{"shift_pi": s, "power": k}, ...]}``
    is ``prod (2 - 2cos(x - s*pi))**k``; ``{"type": "cosine", "a0": a,
    "cos": [c1, c2, ...]}`` is ``a + sum c_k cos(kx)``; ``{"type":
    "x_squared"}`` is the dense symbol ``x**2``.
    """
    kind = desc["type"]
    if kind == "product":
        f = TrigPoly.constant(1.0)
        for fac in desc["factors"]:
            f = f * TrigPoly.cos_factor(np.pi * float(fac.get("shift_pi", 0.0)),
                                        int(fac.get("power", 1)))
        return f
    if kind == "cosine":
        return TrigPoly.from_cosines(float(desc["a0"]), [float(c) for c in desc.get("cos", [])])
    if kind == "x_squared":
        return x_squared()
    raise ValueError(f"unknown symbol type {kind!r}")


def build_zeros(items) -> list[SymbolZero]:
    return [SymbolZero(np.pi * float(z["at_pi"]), int(z.get("order", 2))) for z in items]


@dataclass(frozen=True)
class ExperimentSpec:
    id: str
    kind: str
    f0: dict
    zeros: tuple
    sizes: tuple
    cycles: tuple  # (mode, nu_pre, nu_post)
    g: int = 3
    pre: tuple = ("richardson", 1.0)
    post: tuple = ("cg", 1.0)
    tol: float | None = 1e-7
    max_iter: int = 500
    coarsest_threshold: int = 27
    solution: str = "linear"
    initial_guess: str = "zero"
    seed: int = DEFAULT_SEED
    theta: int | None = None  # overrides the V/W recursion count when set
    projector: dict | None = None
    description: str = ""

    def __post_init__(self):
        if self.kind not in ("circulant", "toeplitz"):
            raise ValueError(f"unknown kind {self.kind!r}")
        for mode, nu_pre, nu_post in self.cycles:
            if mode not in MODES:
                raise ValueError(f"unknown cycle mode {mode!r}")
        if self.solution not in ("linear", "random"):
            raise ValueError(f"unknown solution rule {self.solution!r}")
        if self.initial_guess not in ("zero", "random"):
            raise ValueError(f"unknown initial guess rule {self.initial_guess!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        d = dict(d)
        d["zeros"] = tuple(tuple(sorted(z.items())) if isinstance(z, dict) else z
                           for z in d.get("zeros", ()))
        d["sizes"] = tuple(int(n) for n in d["sizes"])
        d["cycles"] = tuple((str(m), int(a), int(b)) for m, a, b in d["cycles"])
        for key in ("pre", "post"):
            if key in d:
                d[key] = (str(d[key][0]), float(d[key][1]))
        return cls(**d)

    def replace(self, **changes) -> "ExperimentSpec":
        return dataclasses.replace(self, **changes)

    def symbol(self):
        return build_symbol(self.f0)

    def zero_list(self) -> list[SymbolZero]:
        return build_zeros(dict(z) for z in self.zeros)

    def cycle_spec(self, mode: str, nu_pre: int, nu_post: int) -> CycleSpec:
        theta = 2 if mode == "W" else 1
        if self.theta is not None and mode != "TGM":
            theta = self.theta
        return CycleSpec(theta=theta, nu_pre=nu_pre, nu_post=nu_post,
                         pre=Smoother(*self.pre), post=Smoother(*self.post))

    def hierarchy(self, n: int, mode: str):
        p_rule = build_symbol(self.projector) if self.projector else None
        return build_hierarchy(self.symbol(), self.zero_list(), self.kind, n, self.g,
                               p_rule=p_rule, coarsest_threshold=self.coarsest_threshold,
                               max_levels=2 if mode == "TGM" else None)

    def vectors(self, n: int) -> tuple[np.ndarray, np.ndarray | None]:
        """True solution and initial guess for size ``n`` (deterministic in the seed)."""
        rng = np.random.default_rng(self.seed)
        if self.solution == "linear":
            x_true = np.arange(1, n + 1) / n
        else:
            x_true = rng.random(n)
        x0 = rng.random(n) if self.initial_guess == "random" else None
        return x_true, x0


def _zeros(*pairs) -> tuple:
    return tuple((("at_pi", a), ("order", o)) for a, o in pairs)


_EX1_SYMBOL = {"type": "product", "factors": [{"shift_pi": 0.0}, {"shift_pi": 1.0}]}
_ORDER4_SYMBOL = {"type": "product",
                  "factors": [{"shift_pi": 0.0}, {"shift_pi": 1.0, "power": 2}]}
_FULL_GRID = (("TGM", 1, 1), ("TGM", 2, 2), ("V", 1, 1), ("V", 2, 2), ("W", 1, 1), ("W", 2, 2))
_MG_GRID = (("V", 1, 1), ("V", 2, 2), ("W", 1, 1), ("W", 2, 2))
_CIRC_SIZES = (81, 243, 729, 2187)
_TOEP_SIZES_XI3 = (78, 240, 726, 2184)
_TOEP_SIZES_XI1 = (80, 242, 728, 2186)


def builtin_registry() -> list[ExperimentSpec]:
    """The seven built-in experiments (EX1..EX7)."""
    return [
        ExperimentSpec(
            id="EX1", kind="circulant", f0=_EX1_SYMBOL, zeros=_zeros((0, 2), (1, 2)),
            sizes=_CIRC_SIZES, cycles=_FULL_GRID,
            description="circulant, zeros at 0 and pi of order 2"),
        ExperimentSpec(
            id="EX2", kind="toeplitz", f0=_EX1_SYMBOL, zeros=_zeros((0, 2), (1, 2)),
            sizes=_TOEP_SIZES_XI3, cycles=_FULL_GRID,
            description="Toeplitz, zeros at 0 and pi of order 2"),
        ExperimentSpec(
            id="EX3", kind="circulant", f0=_ORDER4_SYMBOL, zeros=_zeros((0, 2), (1, 4)),
            sizes=_CIRC_SIZES, cycles=_FULL_GRID, tol=1e-3,
            description="circulant, order-4 zero at pi, tolerance 1e-3"),
        ExperimentSpec(
            id="EX4", kind="toeplitz", f0=_ORDER4_SYMBOL, zeros=_zeros((0, 2), (1, 4)),
            sizes=_TOEP_SIZES_XI3, cycles=_FULL_GRID, tol=1e-3,
            description="Toeplitz, order-4 zero at pi, tolerance 1e-3"),
        ExperimentSpec(
            id="EX5", kind="toeplitz", f0={"type": "cosine", "a0": 6.0, "cos": [0, -4.0, 0, -2.0]},
            zeros=_zeros((0, 2), (1, 2)), sizes=_TOEP_SIZES_XI3,
            cycles=(("TGM", 1, 1), ("W", 1, 1), ("V", 1, 1)),
            pre=("jacobi", 1.0), post=("jacobi", 2.0), coarsest_threshold=6,
            initial_guess="random",
            description="Toeplitz 6-4cos(2x)-2cos(4x), damped Jacobi, random initial guess"),
        ExperimentSpec(
            id="EX6", kind="toeplitz", f0={"type": "product", "factors": [{"shift_pi": 1.0 / 3.0}]},
            zeros=_zeros((1.0 / 3.0, 2)), sizes=_TOEP_SIZES_XI1, cycles=_MG_GRID,
            solution="random",
            description="Toeplitz, single zero at pi/3, random true solution"),
        ExperimentSpec(
            id="EX7", kind="toeplitz", f0={"type": "x_squared"}, zeros=_zeros((0, 2)),
            sizes=_TOEP_SIZES_XI1, cycles=_MG_GRID,
            description="dense Toeplitz generated by x^2"),
    ]


def get_experiment(exp_id: str) -> ExperimentSpec:
    for exp in builtin_registry():
        if exp.id.lower() == exp_id.lower():
            return exp
    raise KeyError(f"unknown experiment {exp_id!r}")


@dataclass
class ResultRow:
    experiment: str
    n: int
    cycle: str
    nu_pre: int
    nu_post: int
    iterations: int
    converged: bool
    final_rel_res: float
    work_units: float
    wall_time: float = 0.0
    error: str = ""
    history: list = field(default_factory=list, repr=False)


def run_one(exp: ExperimentSpec, n: int, mode: str, nu_pre: int, nu_post: int) -> ResultRow:
    t0 = time.perf_counter()
    try:
        hier = exp.hierarchy(n, mode)
        x_true, x0 = exp.vectors(n)
        b = hier.levels[0].A.matvec(x_true)
        report = solve(hier, b, exp.cycle_spec(mode, nu_pre, nu_post), tol=exp.tol,
                       max_iter=exp.max_iter, x0=x0)
    except ValueError as exc:
        log.warning("%s n=%d %s: %s", exp.id, n, mode, exc)
        return ResultRow(exp.id, n, mode, nu_pre, nu_post, 0, False, float("nan"), 0.0,
                         time.perf_counter() - t0, error=str(exc))
    return ResultRow(exp.id, n, mode, nu_pre, nu_post, report.iterations, report.converged,
                     report.final_rel_residual, report.work_units,
                     time.perf_counter() - t0, history=list(report.rel_residual_history))


def run_experiment(exp: ExperimentSpec) -> list[ResultRow]:
    """Every (size, cycle) combination of ``exp``, in registry order."""
    rows = []
    for n in exp.sizes:
        for mode, nu_pre, nu_post in exp.cycles:
            row = run_one(exp, n, mode, nu_pre, nu_post)
            log.info("%s n=%d %s(%d,%d): %d its", exp.id, n, mode, nu_pre, nu_post,
                     row.iterations)
            rows.append(row)
    return rows


def figure_experiment(kind: str = "circulant", iterations: int = 400) -> ExperimentSpec:
    """Fixed-iteration residual-history runs for the order-4 symbol (V and W, nu = 1)."""
    base = get_experiment("EX3" if kind == "circulant" else "EX4")
    return base.replace(id=f"FIG-{kind}", cycles=(("V", 1, 1), ("W", 1, 1)), tol=None,
                        max_iter=iterations)
