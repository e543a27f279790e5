import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _instances import pipeline_input
from horolivsic import serialization as ser
from horolivsic.cocycles import Cocycle, random_cocycle
from horolivsic.config import ExperimentConfig, config_from_dict, load_config
from horolivsic.errors import ConfigError, ResourceError
from horolivsic.geometry import HALFPLANE as H, TREE as T
from horolivsic.livsic import random_dyadic_table
from horolivsic.reduction import build_interior_section

MODELS = [H, T]


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.name)
@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=10)
def test_cocycle_roundtrip_bit_exact(model, seed):
    A = random_cocycle(model, 2, 1, np.random.default_rng(seed))
    doc = ser.cocycle_to_json(A)
    back = ser.cocycle_from_json(json.loads(ser.dumps(doc)))
    assert back.depth == A.depth and back.m == A.m and back.model_name == A.model_name
    for g, h in zip(A.entries, back.entries):
        assert model.isometry_to_json(g) == model.isometry_to_json(h)
        if not model.exact:
            assert (g.a, g.b, g.c, g.d) == (h.a, h.b, h.c, h.d)


def test_document_is_keyed_by_word():
    A = Cocycle.identity(H, 2)
    doc = ser.cocycle_to_json(A)
    assert doc["kind"] == "cocycle" and doc["model"] == "halfplane" and doc["alphabet"] == 2
    assert set(doc["entries"]) == {"0", "1"}


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.name)
def test_section_roundtrip(model):
    pi = pipeline_input(model, 3, 3)
    back = ser.section_from_json(json.loads(ser.dumps(ser.section_to_json(pi.alpha))))
    assert back.kind == "boundary" and back.values == pi.alpha.values
    s = pi.truth(3)
    back = ser.section_from_json(json.loads(ser.dumps(ser.section_to_json(s))))
    assert back.values == s.values


def test_real_table_roundtrip():
    t = random_dyadic_table(np.random.default_rng(0), 3, 1)
    back = ser.real_table_from_json(json.loads(ser.dumps(ser.real_table_to_json(t))))
    assert np.array_equal(back.values, t.values)


def test_wrong_kind_rejected():
    doc = ser.real_table_to_json(random_dyadic_table(np.random.default_rng(0), 2, 0))
    with pytest.raises(ConfigError):
        ser.cocycle_from_json(doc)


def test_reduction_result_document(tmp_path):
    pi = pipeline_input(H, 4, 3)
    res = build_interior_section(pi.A, pi.alpha, pi.beta, pi.omega0, pi.h0, pi.p, 3, pi.budget)
    doc = ser.reduction_result_to_json(res, {"note": "x"})
    assert {"sections", "residuals", "provenance"} <= set(doc)
    assert set(doc["sections"]) >= {"interior", "alpha", "beta", "u", "phi"}
    interior = ser.section_from_json(doc["sections"]["interior"])
    assert interior.values == res.s.values
    path = ser.write_json(tmp_path / "r.json", doc)
    assert ser.read_json(path) == json.loads(ser.dumps(doc))


def test_non_finite_values_encoded():
    text = ser.dumps({"a": math.inf, "b": np.float64(2.5), "c": np.arange(2)})
    assert json.loads(text) == {"a": "inf", "b": 2.5, "c": [0, 1]}
    assert text.endswith("\n")


def test_csv_floats_round_trip(tmp_path):
    x = 0.1 + 0.2
    path = ser.write_csv(tmp_path / "t.csv", ["k", "v"], [("a", x)])
    line = path.read_text().splitlines()[1]
    assert float(line.split(",")[1]) == x


# --- config ---------------------------------------------------------------------------

def test_default_config_valid():
    cfg = ExperimentConfig()
    assert cfg.tolerances.invariance == 1e-6 and cfg.generator.kind == "coboundary"
    assert config_from_dict(cfg.to_dict()) == cfg


def test_load_config_from_file(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"model": "tree", "seed": 7, "tolerances": {"ppo": 1e-6}}))
    cfg = load_config(path)
    assert cfg.model == "tree" and cfg.seed == 7 and cfg.tolerances.ppo == 1e-6


@pytest.mark.parametrize("bad", [
    {"modle": "tree"},
    {"tolerances": {"geometyr": 1.0}},
    {"tolerances": {"ppo": 0.0}},
    {"tolerances": {"gauge": -1e-3}},
    {"model": "sphere"},
    {"alphabet": 1},
    {"seed": -1},
    {"eps": 0},
    {"generator": {"kind": "bogus"}},
    {"generator": {"depth": 6}},
    {"schema_version": 2},
    {"orbit_budget": 0},
])
def test_bad_config_rejected(bad):
    with pytest.raises(ConfigError):
        config_from_dict(bad)


@pytest.mark.parametrize("bad", [{"depth": 9}, {"livsic_depth": 12}, {"alphabet": 3, "depth": 8},
                                 {"triples": 10**7}])
def test_resource_caps(bad):
    with pytest.raises(ResourceError):
        config_from_dict(bad)


def test_unreadable_config(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.json")
