import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symbolmg import (CycleSpec, HierarchyError, Smoother, SymbolZero, TrigPoly, build_hierarchy,
                      mgm_cycle, solve, tgm_bound, tgm_step, work_model)
from symbolmg.multigrid import WorkCounter, smooth
from symbolmg.structmat import CirculantOp
from symbolmg.symbol import projector_symbol, sup_norm

F_EX1 = TrigPoly.cos_factor(0.0) * TrigPoly.cos_factor(np.pi)
Z_EX1 = [SymbolZero(0.0), SymbolZero(np.pi)]


def _rhs(hier, seed=0):
    n = hier.levels[0].n
    return hier.levels[0].A.matvec(np.random.default_rng(seed).random(n))


def test_smoother_validation():
    with pytest.raises(ValueError):
        Smoother("gauss-seidel")
    with pytest.raises(ValueError):
        Smoother("richardson", 2.0)
    Smoother("jacobi", 2.0)
    with pytest.raises(ValueError):
        Smoother("jacobi", 2.5)
    with pytest.raises(ValueError):
        CycleSpec(theta=0)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), scale=st.floats(0.1, 1.9))
def test_richardson_does_not_increase_energy_error(seed, scale):
    n = 81
    A = CirculantOp(F_EX1, n)
    x_true = np.random.default_rng(seed).standard_normal(n)
    b = A.matvec(x_true)
    x0 = np.zeros(n)
    x1 = smooth(A, x0, b, Smoother("richardson", scale), 1, scale / sup_norm(F_EX1))

    def energy(e):
        return np.real(np.vdot(e, A.matvec(e)))

    assert energy(x1 - x_true) <= energy(x0 - x_true) * (1 + 1e-12)


def test_hierarchy_sizes():
    h = build_hierarchy(F_EX1, Z_EX1, "circulant", 2187, 3)
    assert h.sizes == [2187, 729, 243, 81, 27]
    t = build_hierarchy(F_EX1, Z_EX1, "toeplitz", 2184, 3)
    assert t.sizes == [2184, 726, 240, 78, 24]
    x2 = build_hierarchy(TrigPoly.cos_factor(0.0), [SymbolZero(0.0)], "toeplitz", 2186, 3)
    assert x2.sizes == [2186, 728, 242, 80, 26]
    two = build_hierarchy(F_EX1, Z_EX1, "circulant", 729, 3, max_levels=2)
    assert two.sizes == [729, 243]


def test_projectors_follow_the_zeros():
    f = TrigPoly.cos_factor(np.pi / 3)
    h = build_hierarchy(f, [SymbolZero(np.pi / 3)], "toeplitz", 728, 3)
    locations = [lv.zeros[0].location for lv in h.levels]
    assert np.allclose(locations[:3], [np.pi / 3, np.pi, np.pi])
    # fixed zero set {0, pi}: the same projector at every level
    e = build_hierarchy(F_EX1, Z_EX1, "circulant", 729, 3)
    for lv in e.levels[:-1]:
        assert np.allclose(lv.p.coeffs, e.levels[0].p.coeffs)


def test_mirror_pathology_rejected_for_g2():
    with pytest.raises(HierarchyError):
        build_hierarchy(F_EX1, Z_EX1, "circulant", 64, 2)
    with pytest.raises(ValueError):
        build_hierarchy(F_EX1, [SymbolZero(1.0)], "circulant", 81, 3)


@pytest.mark.parametrize("theta,levels", [(1, 4), (2, 4), (3, 3)])
def test_theta_recursion_count(theta, levels):
    n = 3 ** (levels + 2)
    h = build_hierarchy(F_EX1, Z_EX1, "circulant", n, 3)
    assert len(h) == levels
    counter = WorkCounter()
    b = _rhs(h)
    mgm_cycle(h, 0, np.zeros(n), b, CycleSpec(theta=theta), counter)
    assert counter.coarse_solves == theta ** (levels - 1)


@pytest.mark.parametrize("kind,n", [("circulant", 81), ("toeplitz", 78)])
def test_coarse_correction_exact_on_coarse_space(kind, n):
    h = build_hierarchy(F_EX1, Z_EX1, kind, n, 3, max_levels=2)
    lv = h.levels[0]
    x_true = np.random.default_rng(1).random(n)
    b = lv.A.matvec(x_true)
    y = np.random.default_rng(2).standard_normal(lv.cutting.k_out)
    x = x_true + lv.prolong(y)
    out = tgm_step(h, x, b, CycleSpec(nu_pre=0, nu_post=0))
    # exact up to the kernel of A (constants, for the singular circulant case)
    assert np.allclose(lv.A.matvec(out - x_true), 0.0, atol=1e-9)


def test_tgm_step_matches_cycle():
    h = build_hierarchy(F_EX1, Z_EX1, "circulant", 243, 3, max_levels=2)
    b = _rhs(h)
    x0 = np.zeros(243)
    cyc = CycleSpec()
    assert np.allclose(tgm_step(h, x0, b, cyc), mgm_cycle(h, 0, x0, b, cyc))


def test_level_independent_two_grid():
    counts = []
    for n in (81, 243, 729):
        h = build_hierarchy(F_EX1, Z_EX1, "circulant", n, 3, max_levels=2)
        counts.append(solve(h, _rhs(h), CycleSpec()).iterations)
    assert max(counts) - min(counts) <= 1


def test_solve_report_fields():
    h = build_hierarchy(F_EX1, Z_EX1, "toeplitz", 240, 3)
    b = _rhs(h)
    rep = solve(h, b, CycleSpec(theta=2, nu_pre=2, nu_post=2))
    assert rep.converged and rep.final_rel_residual <= 1e-7
    assert len(rep.rel_residual_history) == rep.iterations + 1
    assert rep.rel_residual_history[0] == 1.0
    assert np.linalg.norm(h.levels[0].A.matvec(rep.x) - b) <= 1e-7 * np.linalg.norm(b)
    fixed = solve(h, b, CycleSpec(), tol=None, max_iter=5)
    assert fixed.iterations == 5 and not fixed.converged
    with pytest.raises(ValueError):
        solve(h, b, CycleSpec(), tol=0.0)


def test_jacobi_smoothers_converge():
    f = TrigPoly.from_cosines(6.0, [0.0, -4.0, 0.0, -2.0])
    h = build_hierarchy(f, Z_EX1, "toeplitz", 240, 3, coarsest_threshold=6)
    cyc = CycleSpec(theta=2, pre=Smoother("jacobi", 1.0), post=Smoother("jacobi", 2.0))
    rep = solve(h, _rhs(h), cyc, x0=np.random.default_rng(0).random(240))
    assert rep.converged and rep.iterations < 40


def test_tgm_bound_constants():
    p = projector_symbol(Z_EX1, 3)
    b = tgm_bound(F_EX1, p, 3, zeros=Z_EX1)
    assert b.alpha_post == pytest.approx(0.5)
    assert 0.0 < b.rho < 1.0
    with pytest.raises(ValueError):
        tgm_bound(F_EX1, p, 3, omega=1.0)


def test_work_model():
    assert work_model(3, 2, c=5.0, n=729.0).value == pytest.approx(3 * 5.0 * 729.0)
    assert work_model(3, 1).regime == "linear"
    assert work_model(2, 2, n=1024.0).regime == "nlogn"
    assert work_model(3, 2, levels=3).finite_value == pytest.approx(1 + 2 / 3 + 4 / 9)
    with pytest.raises(ValueError):
        work_model(2, 3)


def test_level_cost_counts_cg_start():
    assert CycleSpec(nu_pre=1, nu_post=1).level_cost == 5
    assert CycleSpec(nu_pre=1, nu_post=1, post=Smoother("jacobi", 2.0)).level_cost == 4
