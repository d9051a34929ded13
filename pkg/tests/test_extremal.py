import math
from dataclasses import replace

import numpy as np
import pytest
from numpy.polynomial import chebyshev as C

from chebpot.errors import (
    DifferentGapError,
    PoleOnSetError,
    WeightDegenerateError,
)
from chebpot.extremal import (
    RemezOptions,
    renormalize,
    solve_extremal,
    verify_alternation,
)
from chebpot.realset import make_set
from chebpot.weights import (
    AbsPolyWeight,
    RecipPolyWeight,
    SampledWeight,
    SemicircleWeight,
    UnitWeight,
)
from oracles import lp_minimax, t_monic_chebyshev, t_residual_interval

E1 = make_set([(-1, 1)])
E06 = make_set([(-1, -0.6), (0.6, 1)])
UNIT = UnitWeight()


def test_classical_chebyshev_n3():
    sol = solve_extremal(E1, UNIT, math.inf, 3)
    assert abs(sol.t - 0.25) < 1e-12
    np.testing.assert_allclose(sol.coefficients(), [0, -0.75, 0, 1], atol=1e-12)
    np.testing.assert_allclose(sol.alternation, [-1, -0.5, 0.5, 1], atol=1e-10)
    assert sol.k_star == 4 and sol.signs == (-1, 1, -1, 1)
    # LP on a shared grid never exceeds the continuum minimum
    t_lp = lp_minimax(E1, UNIT, 3)
    assert t_lp <= sol.t + 1e-12
    assert sol.t - t_lp < 1e-6


@pytest.mark.parametrize("n", [1, 2, 5, 8, 12])
def test_monic_chebyshev_norms(n):
    sol = solve_extremal(E1, UNIT, math.inf, n)
    assert abs(sol.t - t_monic_chebyshev(n)) < 1e-12 * t_monic_chebyshev(n)


def test_residual_n2_at_two():
    sol = solve_extremal(E1, UNIT, 2.0, 2)
    assert abs(sol.t - 1 / 7) < 1e-14
    np.testing.assert_allclose(sol.alternation, [-1, 0, 1], atol=1e-9)
    assert sol.k_star == 3
    t_lp = lp_minimax(E1, UNIT, 2, x_star=2.0)
    assert t_lp <= sol.t + 1e-12 and sol.t - t_lp < 1e-6


@pytest.mark.parametrize("n", [1, 3, 6])
def test_residual_norms_closed_form(n):
    sol = solve_extremal(E1, UNIT, 2.0, n)
    want = t_residual_interval(n, 2.0)
    assert abs(sol.t - want) < 1e-12 * want


def test_second_kind_chebyshev():
    w = SemicircleWeight([(-1, 1)])
    sol = solve_extremal(E1, w, math.inf, 4)
    assert abs(sol.t - 2.0**-4) < 1e-12


def test_recip_weight_lp_cross_check():
    w = RecipPolyWeight([-3.0, 1.0])
    sol = solve_extremal(E1, w, math.inf, 4)
    t_lp = lp_minimax(E1, w, 4)
    assert t_lp <= sol.t + 1e-14
    assert sol.t - t_lp < 1e-6 * sol.t


def test_two_interval_lp_cross_check():
    sol = solve_extremal(E06, UNIT, math.inf, 5)
    t_lp = lp_minimax(E06, UNIT, 5)
    assert t_lp <= sol.t + 1e-14
    assert sol.t - t_lp < 1e-5 * sol.t


def test_grid_refinement_stability():
    w = AbsPolyWeight([-0.3, 1.0])
    a = solve_extremal(E1, w, math.inf, 7, RemezOptions(grid=2048))
    b = solve_extremal(E1, w, math.inf, 7, RemezOptions(grid=4096))
    assert abs(a.t - b.t) < 1e-9 * a.t


def test_zeros_real_simple_and_off_straddle():
    sol = solve_extremal(E06, UNIT, 0.0, 4)
    zs = sol.zeros()
    assert np.all(np.abs(zs.imag) < 1e-8)
    zs = np.sort(zs.real)
    assert np.all(np.diff(zs) > 1e-10)
    lo = sol.alternation[sol.k_star - 1]
    hi = sol.alternation[sol.k_star % len(sol.alternation)]
    if sol.k_star < len(sol.alternation):
        assert not np.any((zs > lo) & (zs < hi))


def test_degenerate_degree_in_bounded_gap():
    sol = solve_extremal(E06, UNIT, 0.0, 1)
    assert sol.degree == 0
    assert abs(sol.t - 1.0) < 1e-12
    assert sol.signs == (1, 1)  # no sign change across the straddling pair


def test_sign_pattern_invariance():
    for sol in (
        solve_extremal(E1, UNIT, math.inf, 4),
        solve_extremal(E06, UNIT, 0.0, 3),
        solve_extremal(E1, UNIT, 2.0, 3),
    ):
        pts = np.asarray(sol.alternation)
        s = np.ones(len(pts)) if math.isinf(sol.x_star) else np.sign(sol.x_star - pts)
        j = np.arange(1, len(pts) + 1)
        expected = ((-1.0) ** (sol.k_star - j)) * s
        assert np.array_equal(np.sign(expected).astype(int), np.asarray(sol.signs))


def test_weight_scaling():
    w = AbsPolyWeight([-0.3, 1.0])
    t1 = solve_extremal(E1, w, math.inf, 5).t
    t3 = solve_extremal(E1, w.scaled(3.0), math.inf, 5).t
    assert abs(t3 - 3 * t1) < 1e-10 * t3


def test_weight_monotonicity():
    w_small = SemicircleWeight([(-1, 1)])  # <= 1 on [-1, 1]
    t_small = solve_extremal(E1, w_small, math.inf, 5).t
    t_big = solve_extremal(E1, UNIT, math.inf, 5).t
    assert t_small <= t_big + 1e-14


def test_weight_degenerate_rejected():
    w = SampledWeight([-1, 1], [0.0, 0.0])
    with pytest.raises(WeightDegenerateError):
        solve_extremal(E1, w, math.inf, 2)


def test_x_star_on_set_rejected():
    with pytest.raises(PoleOnSetError):
        solve_extremal(E1, UNIT, 0.5, 2)


def test_sampled_weight_close_to_exact():
    grid = np.linspace(-1, 1, 20001)
    w = SampledWeight(grid, np.abs(grid - 0.3))
    exact = solve_extremal(E1, AbsPolyWeight([-0.3, 1.0]), math.inf, 4)
    approx = solve_extremal(E1, w, math.inf, 4)
    assert abs(approx.t - exact.t) < 1e-5 * exact.t


# -- verify_alternation ---------------------------------------------------


def test_verify_passes_for_solution():
    sol = solve_extremal(E1, UNIT, math.inf, 3)
    rep = verify_alternation(sol, E1, UNIT)
    assert rep.passed and rep.pattern_ok
    assert rep.audit_excess < 1e-10


def test_verify_detects_perturbation():
    sol = solve_extremal(E1, UNIT, math.inf, 3)
    bump = 1e-3 * sol.half**sol.n * np.asarray(C.poly2cheb([0] * sol.n + [1]))
    coeffs = np.asarray(sol.cheb_coeffs) + bump
    bad = replace(sol, cheb_coeffs=tuple(coeffs))
    rep = verify_alternation(bad, E1, UNIT)
    assert not rep.passed
    assert rep.audit_max > sol.t


def test_verify_n1():
    sol = solve_extremal(E1, UNIT, math.inf, 1)
    assert abs(sol.t - 1.0) < 1e-14
    np.testing.assert_allclose(sol.alternation, [-1, 1], atol=1e-12)
    assert sol.k_star == 2 and sol.signs == (-1, 1)
    assert verify_alternation(sol, E1, UNIT).passed


# -- renormalize ------------------------------------------------------------


def test_renormalize_identity():
    sol = solve_extremal(E1, UNIT, 2.0, 2)
    assert renormalize(sol, 2.0) is sol


def test_renormalize_matches_direct_solve():
    sol = solve_extremal(E1, UNIT, 2.0, 2)
    moved = renormalize(sol, 3.0)
    direct = solve_extremal(E1, UNIT, 3.0, 2)
    assert abs(moved.t - direct.t) < 1e-9
    x = np.linspace(-1, 1, 7)
    np.testing.assert_allclose(moved(x), direct(x), atol=1e-9)


def test_renormalize_infinity_to_finite():
    base = solve_extremal(E1, UNIT, math.inf, 3)
    moved = renormalize(base, 2.0)
    assert abs(moved(2.0) - 1.0) < 1e-14
    direct = solve_extremal(E1, UNIT, 2.0, 3)
    assert abs(moved.t - direct.t) < 1e-12


def test_renormalize_finite_to_infinity():
    base = solve_extremal(E1, UNIT, 2.0, 3)
    mono = renormalize(base, math.inf)
    assert abs(mono.leading_coefficient() - 1.0) < 1e-12
    assert abs(mono.t - t_monic_chebyshev(3)) < 1e-12


def test_renormalize_different_gap_rejected():
    sol = solve_extremal(E06, UNIT, 0.0, 2)
    with pytest.raises(DifferentGapError):
        renormalize(sol, 2.0)
    with pytest.raises(DifferentGapError):
        renormalize(sol, math.inf)
