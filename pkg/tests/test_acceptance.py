"""Acceptance criteria, each at its stated tolerance.

The terminal summary prints one PASS/FAIL line per criterion (see conftest).
"""
import json
import time

import numpy as np
import pytest

from _instances import pipeline_input, sections_gap
from horolivsic.cli import EXIT_PASS, run
from horolivsic.cocycles import boundary_ppo_check, ppo_check
from horolivsic.errors import ObstructionError
from horolivsic.geometry import HALFPLANE as H, TREE as T
from horolivsic.geometry.checks import (
    busemann_along_geodesic, busemann_base_change, busemann_equivariance, busemann_fast_path,
    busemann_lipschitz, strong_hyperbolicity_check,
)
from horolivsic.livsic import (
    gap_to_ground_truth, ppo_real_check, random_dyadic_table, random_telescoped, solve_livsic,
)
from horolivsic.reduction import factor_check, induce_phi, reconstruct_B

MODELS = [H, T]
ids = lambda m: m.name
SEEDS = range(10)

C1 = pytest.mark.acceptance(1, "Busemann identity suites")
C2 = pytest.mark.acceptance(2, "strong hyperbolicity and the Busemann fast path")
C3 = pytest.mark.acceptance(3, "factor relation")
C4 = pytest.mark.acceptance(4, "real cohomological equation solver")
C5 = pytest.mark.acceptance(5, "end-to-end reduction pipeline")
C6 = pytest.mark.acceptance(6, "periodic obstruction transfer")
C7 = pytest.mark.acceptance(7, "byte-identical reports")


# --- 1 --------------------------------------------------------------------------------

BUSEMANN_SUITES = [busemann_along_geodesic, busemann_equivariance, busemann_lipschitz,
                   busemann_base_change]


@C1
@pytest.mark.parametrize("model", MODELS, ids=ids)
def test_busemann_suites(model):
    start = time.perf_counter()
    for suite in BUSEMANN_SUITES:
        res = suite(model, instances=100, seed=11)
        assert res.instances >= 100
        if model.exact:
            assert res.max_residual == 0, res
        else:
            assert res.max_residual <= 1e-8, res
    elapsed = time.perf_counter() - start
    print(f"busemann suites ({model.name}): {elapsed:.2f} s")
    assert elapsed < 10


# --- 2 --------------------------------------------------------------------------------

@C2
@pytest.mark.parametrize("model", MODELS, ids=ids)
def test_strong_hyperbolicity(model):
    rep = strong_hyperbolicity_check(model, eps=1.0, samples=10_000, seed=12)
    assert rep.samples == 10_000 and rep.violations == 0


@C2
@pytest.mark.parametrize("model", MODELS, ids=ids)
def test_fast_path_against_limit(model):
    res = busemann_fast_path(model, instances=200, seed=13)
    assert res.max_residual <= 1e-7


# --- 3 --------------------------------------------------------------------------------

@C3
@pytest.mark.parametrize("seed", SEEDS)
def test_factor_relation(seed):
    pi = pipeline_input(H, 300 + seed, 6, transfer_depth=2)
    phi = induce_phi(pi.A, pi.alpha, pi.p)
    rep = factor_check(pi.A, pi.alpha, phi, samples=1000, seed=seed)
    assert rep.samples == 1000 and rep.max_residual <= 1e-7


# --- 4 --------------------------------------------------------------------------------

@C4
@pytest.mark.parametrize("seed", SEEDS)
def test_livsic_ground_truth_and_refinement(seed):
    psi, g = random_telescoped(400 + seed, 2, depth=2)
    assert psi.depth <= 3
    prev = np.inf
    for depth in (4, 6, 8):
        start = time.perf_counter()
        sol = solve_livsic(psi, u0=0.25, depth=depth)
        elapsed = time.perf_counter() - start
        gap = gap_to_ground_truth(sol, g)
        assert gap <= sol.tabulation_bound
        assert gap <= prev
        prev = gap
        if depth == 8:
            assert elapsed < 30


@C4
def test_livsic_obstruction_always_raised():
    rng = np.random.default_rng(44)
    for k in range(20):
        psi = random_dyadic_table(rng, 2, 1 + k % 3)
        assert not ppo_real_check(psi).passed
        with pytest.raises(ObstructionError):
            solve_livsic(psi, depth=psi.depth + 1)


# --- 5 --------------------------------------------------------------------------------

@C5
@pytest.mark.parametrize("seed", SEEDS)
def test_pipeline_end_to_end(seed):
    start = time.perf_counter()
    pi = pipeline_input(H, 500 + seed, 6, transfer_depth=2)
    rng = np.random.default_rng(seed)
    anchors = [pi.h0] + [H.random_point(rng, pi.p, 1.5) for _ in range(2)]
    rec = reconstruct_B(pi.A, pi.omega0, anchors, pi.inst.section_provider(pi.omega0), pi.xi0,
                        pi.p, 6, pi.budget)
    for h, res in zip(anchors, rec.results):
        assert res.invariance.max_residual <= 1e-6
        truth = pi.inst.interior_section(pi.omega0, h).lift(6)
        assert sections_gap(H, res.s, truth) <= 1e-5
    assert rec.isometry_defect <= 1e-6
    elapsed = time.perf_counter() - start
    print(f"pipeline seed {seed}: {elapsed:.2f} s")
    assert elapsed < 120


# --- 6 --------------------------------------------------------------------------------

@C6
@pytest.mark.parametrize("model", MODELS, ids=ids)
@pytest.mark.parametrize("seed", SEEDS)
def test_ppo_transfer(model, seed):
    pi = pipeline_input(model, 600 + seed, 4, transfer_depth=1 + seed % 2)
    rep = ppo_check(pi.A, tol=1e-9)
    assert rep.passed
    assert boundary_ppo_check(pi.A, tol=1e-9).passed
    phi = induce_phi(pi.A, pi.alpha, pi.p)
    assert ppo_real_check(phi.table, tol=1e-8).passed


# --- 7 --------------------------------------------------------------------------------

RUNS = [
    ("verify-lemmas", {"instances": 100, "triples": 2000}),
    ("verify-lemmas", {"model": "tree", "instances": 100, "triples": 2000}),
    ("ppo", {}),
    ("livsic", {"livsic_depth": 5}),
    ("reduce", {"depth": 6}),
    ("reduce", {"model": "tree", "generator": {"depth": 1}, "depth": 4}),
    ("gen", {"generator": {"depth": 1}, "depth": 4}),
]


@C7
@pytest.mark.parametrize("command,cfg", RUNS, ids=[f"{c}-{i}" for i, (c, _) in enumerate(RUNS)])
def test_reports_byte_identical(tmp_path, command, cfg):
    (tmp_path / "cfg.json").write_text(json.dumps({"seed": 42, **cfg}))
    outputs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert run([command, "--config", str(tmp_path / "cfg.json"), "--out", str(out)]) == EXIT_PASS
        outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir()) if p.suffix == ".json"})
    assert outputs[0] and outputs[0] == outputs[1]
