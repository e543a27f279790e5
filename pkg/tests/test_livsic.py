import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from horolivsic.base_dynamics import BasePoint, decode, encode, enumerate_periodic_orbits, n_words
from horolivsic.errors import CoverageError, DomainError, ObstructionError
from horolivsic.livsic import (
    RealTable, coboundary_of, constant_offset_gap, gap_to_ground_truth, ppo_real_check,
    random_dyadic_table, random_telescoped, solve_livsic, verify_solution,
)

seeds = st.integers(0, 2**32 - 1)


def orbit_sum_oracle(psi, word):
    # evaluate psi on each shift of the periodic point, reading its window directly
    x = BasePoint.periodic(tuple(word), psi.m)
    return sum(psi(x.shift(j)) for j in range(len(word)))


# --- periodic orbit sums -------------------------------------------------------------

@given(seeds)
@settings(max_examples=20)
def test_telescoped_sums_vanish(seed):
    psi, _ = random_telescoped(seed, depth=1)
    rep = ppo_real_check(psi)
    assert rep.passed and rep.max_abs_sum <= 1e-12


def test_constant_one_fails_at_fixed_point():
    rep = ppo_real_check(RealTable.constant(1.0), 3)
    assert not rep.passed
    sums = dict(zip(rep.labels, rep.sums))
    assert sums["0"] == 1.0 and sums["1"] == 1.0 and sums["01"] == 2.0
    assert len(rep.failures()) == len(enumerate_periodic_orbits(3))


def test_sums_match_direct_orbit_evaluation():
    rng = np.random.default_rng(0)
    psi = random_dyadic_table(rng, 2, 2)
    rep = ppo_real_check(psi, 7)
    orbits = enumerate_periodic_orbits(7)
    assert len(rep.labels) == len(orbits)
    for orbit, s in zip(orbits, rep.sums):
        assert s == pytest.approx(orbit_sum_oracle(psi, orbit.word), abs=1e-12)


def test_sums_three_letters():
    rng = np.random.default_rng(1)
    psi = random_dyadic_table(rng, 3, 1)
    rep = ppo_real_check(psi, 4)
    for orbit, s in zip(enumerate_periodic_orbits(4, 3), rep.sums):
        assert s == pytest.approx(orbit_sum_oracle(psi, orbit.word), abs=1e-12)


# --- residual verification -----------------------------------------------------------

def test_exact_pair_has_zero_residual():
    psi, g = random_telescoped(2, depth=2)
    assert verify_solution(g.lift(psi.depth), psi).max_residual == 0.0


def test_residual_detects_single_cylinder_perturbation():
    psi, g = random_telescoped(3, depth=2)
    u = g.lift(3)
    bad = u.with_value(17, u.value(17) + 1e-3)
    rep = verify_solution(bad, psi, tol=1e-9)
    assert rep.max_residual >= 1e-3 - 1e-9 and not rep.passed


def test_residual_matches_exhaustive_scan():
    rng = np.random.default_rng(4)
    psi = random_dyadic_table(rng, 2, 1)
    u = random_dyadic_table(rng, 2, 2)
    brute = 0.0
    for w in itertools.product(range(2), repeat=6):
        # transition from the cylinder w[0:5] to w[1:6]; psi reads w[1:4]
        brute = max(brute, abs(u.value(encode(w[1:], 2)) - u.value(encode(w[:-1], 2))
                               - psi.value(encode(w[1:4], 2))))
    rep = verify_solution(u, psi)
    assert rep.max_residual == brute
    assert rep.rows(2, 2, 1)[0][1] == brute


def test_depth_mismatch_rejected():
    with pytest.raises(DomainError):
        verify_solution(RealTable.constant(0.0, depth=0), RealTable.constant(0.0, depth=1))


# --- solver --------------------------------------------------------------------------

def test_zero_psi_gives_constant():
    sol = solve_livsic(RealTable.constant(0.0, depth=1), u0=2.5, depth=3)
    assert np.all(sol.u.values == 2.5) and sol.residual.max_residual == 0.0


@pytest.mark.parametrize("depth", [2, 4, 6])
def test_recovers_ground_truth(depth):
    psi, g = random_telescoped(5, depth=1)
    sol = solve_livsic(psi, u0=0.7, depth=depth)
    gap = gap_to_ground_truth(sol, g)
    assert gap <= sol.error_bound
    assert sol.residual.max_residual <= 1e-12
    assert sol.u(sol.omega0) == 0.7


def test_ground_truth_against_hand_computed_gauge():
    psi, g = random_telescoped(6, depth=1)
    sol = solve_livsic(psi, u0=0.0, depth=3)
    c = -g(sol.omega0)
    for code in range(n_words(2, 3)):
        x = BasePoint.from_window(decode(code, 7, 2))
        assert sol.u(x) == pytest.approx(g(x) + c, abs=1e-12)


@given(seeds, st.floats(-5, 5), st.floats(-5, 5))
@settings(max_examples=15)
def test_gauge_freedom(seed, a, b):
    psi, _ = random_telescoped(seed, depth=1)
    s1 = solve_livsic(psi, u0=a, depth=4)
    s2 = solve_livsic(psi, u0=b, depth=4)
    gap = constant_offset_gap(s1.u, s2.u, b - a)
    assert gap <= 2 * max(s1.error_bound, s2.error_bound) + 1e-12


def test_gauge_with_different_starting_points():
    psi, _ = random_telescoped(7, depth=1)
    s1 = solve_livsic(psi, depth=3)
    omega1 = s1.omega0.shift(3)
    s2 = solve_livsic(psi, omega1, u0=0.0, depth=3, orbit_budget=4000)
    offset = s2.u(omega1) - s1.u(omega1)
    assert constant_offset_gap(s1.u, s2.u, offset) <= 2 * max(s1.error_bound, s2.error_bound) + 1e-12


def test_obstruction_on_twenty_failing_tables():
    rng = np.random.default_rng(8)
    raised = 0
    for _ in range(20):
        psi = random_dyadic_table(rng, 2, 1)
        assert not ppo_real_check(psi).passed
        with pytest.raises(ObstructionError) as err:
            solve_livsic(psi, depth=2)
        assert err.value.orbit
        raised += 1
    assert raised == 20


def test_obstruction_from_planted_fault():
    psi, _ = random_telescoped(9, depth=1)
    with pytest.raises(ObstructionError):
        solve_livsic(psi.with_value(3, psi.value(3) + 1e-4), depth=3)


def test_coverage_error_lists_cylinders():
    psi, _ = random_telescoped(10, depth=1)
    with pytest.raises(CoverageError) as err:
        solve_livsic(psi, BasePoint.constant(0), depth=2, orbit_budget=50)
    assert len(err.value.missing) > 0


def test_monotone_refinement():
    psi, g = random_telescoped(11, depth=2)
    prev_gap, prev_res = np.inf, np.inf
    for d in (3, 4, 5, 6):
        sol = solve_livsic(psi, depth=d)
        gap = gap_to_ground_truth(sol, g)
        assert gap <= prev_gap and sol.residual.max_residual <= prev_res
        prev_gap, prev_res = gap, sol.residual.max_residual


def test_coboundary_of_is_telescoping():
    rng = np.random.default_rng(12)
    g = random_dyadic_table(rng, 2, 1)
    psi = coboundary_of(g)
    x = BasePoint.random(rng)
    assert psi(x) == g(x.shift(1)) - g(x)


def test_summary_keys():
    psi, _ = random_telescoped(13, depth=1)
    s = solve_livsic(psi, depth=2).summary()
    assert {"depth", "u0", "max_residual", "tabulation_bound", "holder_constant"} <= set(s)
