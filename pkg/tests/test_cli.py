import json

import pytest

from horolivsic import serialization as ser
from horolivsic.base_dynamics import enumerate_periodic_orbits
from horolivsic.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_PASS, EXIT_RESOURCE, run
from horolivsic.cocycles import Section, random_coboundary
from horolivsic.geometry.halfplane import Mobius
from horolivsic.geometry import HALFPLANE as H


def write_config(path, **kw):
    path.write_text(json.dumps(kw))
    return str(path)


def invoke(tmp_path, command, name="out", **cfg):
    out = tmp_path / name
    argv = [command, "--out", str(out)]
    if cfg:
        argv += ["--config", write_config(tmp_path / f"{name}.cfg.json", **cfg)]
    code = run(argv)
    return code, json.loads((out / (command.replace("-", "_") + ".json")).read_text()), out


@pytest.fixture(scope="module")
def reduce_runs(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("reduce")
    return [invoke(tmp, "reduce", f"run{k}", seed=42, depth=6) for k in range(2)]


# --- verify-lemmas -------------------------------------------------------------------

def test_verify_lemmas_halfplane(tmp_path):
    code, rep, out = invoke(tmp_path, "verify-lemmas", instances=30, triples=2000)
    assert code == EXIT_PASS and rep["status"] == "pass"
    names = [s["name"] for s in rep["suites"]]
    assert "strong_hyperbolicity" in names and "busemann_fast_path" in names
    assert (out / "verify_lemmas.csv").exists()


def test_verify_lemmas_tree_exact(tmp_path):
    code, rep, _ = invoke(tmp_path, "verify-lemmas", model="tree", instances=30, triples=2000)
    assert code == EXIT_PASS
    for s in rep["suites"]:
        if s["name"] != "boundary_lipschitz":
            assert s["max_residual"] == 0


# --- ppo -----------------------------------------------------------------------------

def test_ppo_on_coboundary_file(tmp_path):
    A = random_coboundary(H, 2, 1, seed=5).A
    ser.write_json(tmp_path / "A.json", ser.cocycle_to_json(A))
    code, rep, out = invoke(tmp_path, "ppo", cocycle_file=str(tmp_path / "A.json"))
    assert code == EXIT_PASS and rep["failures"] == []
    assert rep["orbits"] == rep["expected_orbits"] == len(enumerate_periodic_orbits(rep["max_period"]))
    rows = (out / "ppo.csv").read_text().splitlines()
    assert len(rows) == rep["orbits"] + 1


def test_ppo_constant_cocycle_fails_with_orbit(tmp_path):
    code, rep, _ = invoke(tmp_path, "ppo", generator={"kind": "constant", "depth": 0}, depth=2)
    assert code == EXIT_NUMERICAL and rep["status"] == "fail"
    orbits = {f["orbit"] for f in rep["failures"]}
    assert {"0", "1"} <= orbits


# --- livsic --------------------------------------------------------------------------

def test_livsic_default(tmp_path):
    code, rep, out = invoke(tmp_path, "livsic", livsic_depth=4)
    assert code == EXIT_PASS
    assert rep["ground_truth_gap"] <= rep["solution"]["tabulation_bound"] + rep["solution"]["roundoff_bound"]
    assert (out / "livsic_residuals.csv").exists() and (out / "livsic_solution.json").exists()


def test_livsic_obstruction_exit_code(tmp_path):
    code, rep, _ = invoke(tmp_path, "livsic", livsic_depth=4, livsic_perturbation=1e-3)
    assert code == EXIT_NUMERICAL and rep["error"]["code"] == "obstruction"
    assert rep["error"]["orbit"]


# --- reduce --------------------------------------------------------------------------

def test_reduce_seed_42_depth_6(reduce_runs):
    code, rep, out = reduce_runs[0]
    assert code == EXIT_PASS
    for name in ("invariance", "factor", "livsic", "phi_holder", "ground_truth",
                 "anchor_images", "anchor_distances"):
        assert rep["checks"][name]["passed"], name
    assert (out / "reduce_result.json").exists() and (out / "reduce_residuals.csv").exists()


def test_reduce_deterministic(reduce_runs):
    (_, _, a), (_, _, b) = reduce_runs
    for name in ("reduce.json", "reduce_result.json", "reduce_residuals.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_reduce_identity_gives_constant_section(tmp_path):
    code, _, out = invoke(tmp_path, "reduce", generator={"kind": "identity", "depth": 0}, depth=3)
    assert code == EXIT_PASS
    doc = ser.read_json(out / "reduce_result.json")
    s = ser.section_from_json(doc["sections"]["interior"])
    first = s.values[0]
    assert max(H.distance(first, v) for v in s.values) <= 1e-9


def test_reduce_tree(tmp_path):
    code, rep, _ = invoke(tmp_path, "reduce", model="tree", generator={"depth": 1}, depth=4)
    assert code == EXIT_PASS
    assert rep["checks"]["invariance"]["value"] == 0 and rep["checks"]["ground_truth"]["value"] == 0


def test_gen_then_reduce(tmp_path):
    code, rep, out = invoke(tmp_path, "gen", "gen", generator={"depth": 1}, depth=4)
    assert code == EXIT_PASS and (out / "instance.json").exists()
    code, rep, _ = invoke(tmp_path, "reduce", "red", instance_file=str(out / "instance.json"), depth=4)
    assert code == EXIT_PASS and rep["source"] == "instance_file"


def test_corrupted_section_gives_invariance_code(tmp_path):
    _, _, out = invoke(tmp_path, "gen", "gen", generator={"depth": 1}, depth=4)
    doc = ser.read_json(out / "instance.json")
    alpha = ser.section_from_json(doc["alpha"])
    values = list(alpha.values)
    values[1] = Mobius.rotation(0.3).apply_boundary(values[1])
    doc["alpha"] = ser.section_to_json(Section(alpha.m, alpha.depth, tuple(values), "boundary", alpha.model_name))
    ser.write_json(tmp_path / "bad.json", doc)
    code, rep, _ = invoke(tmp_path, "reduce", "red", instance_file=str(tmp_path / "bad.json"), depth=4)
    assert code == EXIT_NUMERICAL and rep["status"] == "error"
    assert rep["error"]["code"] == "invariance" and rep["error"]["worst"]


# --- exit codes and flags ------------------------------------------------------------

def test_config_error_exit_code(tmp_path):
    code, rep, _ = invoke(tmp_path, "ppo", unknown_key=1)
    assert code == EXIT_CONFIG and rep["error"]["code"] == "config"


def test_resource_exit_code(tmp_path):
    code, rep, _ = invoke(tmp_path, "livsic", livsic_depth=9, depth=9)
    assert code == EXIT_RESOURCE and rep["error"]["code"] == "resource_cap"


def test_reduce_random_cocycle_needs_sections(tmp_path):
    code, rep, _ = invoke(tmp_path, "reduce", generator={"kind": "random", "depth": 1}, depth=3)
    assert code == EXIT_CONFIG


def test_flags_override_config(tmp_path):
    out = tmp_path / "o"
    code = run(["ppo", "--out", str(out), "--seed", "9", "--model", "tree", "--tol", "1e-6"])
    rep = json.loads((out / "ppo.json").read_text())
    assert code == EXIT_PASS
    assert rep["seed"] == 9 and rep["model"] == "tree" and rep["tol"] == 1e-6
    assert rep["schema_version"] == 1


def test_nonpositive_tol_rejected(tmp_path):
    assert run(["ppo", "--out", str(tmp_path), "--tol", "0"]) == EXIT_CONFIG
