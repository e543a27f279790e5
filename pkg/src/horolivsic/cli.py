"""Batch driver.  Every subcommand writes a JSON report (and CSV tables where
there are per-item residuals) into the output directory.

Exit codes: 0 pass, 2 numerical failure, 3 configuration error, 4 resource cap.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

import numpy as np

from . import serialization as ser
from .base_dynamics import enumerate_periodic_orbits, transitive_point, word_str
from .cocycles import (CoboundaryInstance, Cocycle, boundary_ppo_check, default_max_period,
                       make_coboundary_cocycle, ppo_check, random_coboundary, random_cocycle)
from .config import ExperimentConfig, load_config
from .errors import ConfigError, HoroLivsicError, ResourceError
from .geometry import backward_end, get_model
from .geometry.checks import run_suites
from .livsic import (gap_to_ground_truth, random_telescoped,
                     solve_livsic)
from .reduction import (build_interior_section, factor_check, phi_holder_report,
                        reconstruct_B)

log = logging.getLogger("horolivsic")

EXIT_PASS, EXIT_NUMERICAL, EXIT_CONFIG, EXIT_RESOURCE = 0, 2, 3, 4

# the primary tolerance each subcommand's --tol overrides
TOL_FIELD = {"verify-lemmas": "geometry", "ppo": "ppo", "livsic": "livsic",
             "reduce": "invariance", "gen": "ppo"}


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, ResourceError):
        return EXIT_RESOURCE
    return EXIT_NUMERICAL


def _header(command: str, cfg: ExperimentConfig) -> dict:
    # the output directory is left out so runs into different directories compare equal
    config = {k: v for k, v in cfg.to_dict().items() if k != "out_dir"}
    return {"schema_version": ser.SCHEMA_VERSION, "command": command, "model": cfg.model,
            "seed": cfg.seed, "config": config}


def _base_point(cfg, model):
    if cfg.base_point is None:
        return model.base_point()
    try:
        return model.point_from_json(cfg.base_point)
    except (TypeError, ValueError, IndexError, HoroLivsicError) as exc:
        raise ConfigError(f"bad base point {cfg.base_point!r}: {exc}") from exc


def _rng(cfg, stream: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, stream])


# --- instance sources ------------------------------------------------------------

@dataclasses.dataclass
class Source:
    """A cocycle with, when known, its hidden transfer function and sections."""

    A: Cocycle
    instance: CoboundaryInstance | None = None
    alpha: object = None
    beta: object = None
    xi0: object = None
    h0: object = None
    origin: str = "generator"


def _check_model(cfg, A):
    if A.model_name != cfg.model:
        raise ConfigError(f"cocycle uses model {A.model_name!r} but the config selects {cfg.model!r}")
    if A.m != cfg.alphabet:
        raise ConfigError(f"cocycle alphabet {A.m} differs from the configured {cfg.alphabet}")


def generate_instance(cfg) -> Source:
    model = get_model(cfg.model)
    gen = cfg.generator
    if gen.kind == "coboundary":
        inst = random_coboundary(model, cfg.alphabet, gen.depth, cfg.seed, gen.scale)
        return Source(inst.A, inst)
    if gen.kind == "identity":
        B = Cocycle.identity(model, cfg.alphabet)
        return Source(make_coboundary_cocycle(B, cfg.seed).A, make_coboundary_cocycle(B, cfg.seed))
    rng = _rng(cfg, 1)
    if gen.kind == "constant":
        g = model.random_isometry(rng, gen.scale)
        while g.is_identity(1e-9):
            g = model.random_isometry(rng, gen.scale)
        return Source(Cocycle.constant(g, cfg.alphabet, model))
    return Source(random_cocycle(model, cfg.alphabet, gen.depth, rng, gen.scale))


def _with_sections(cfg, src: Source, omega0) -> Source:
    """Fill the boundary sections from the hidden transfer function."""
    if src.alpha is not None:
        return src
    if src.instance is None:
        raise ConfigError("reduce needs invariant boundary sections: supply them in the instance "
                          "file or use a coboundary or identity generator")
    model = src.A.model
    rng = _rng(cfg, 2)
    p = _base_point(cfg, model)
    src.xi0 = model.random_boundary(rng)
    src.h0 = model.random_point(rng, p, 1.5) if not model.exact else model.random_point(rng, p, 2)
    src.alpha = src.instance.boundary_section(omega0, src.xi0)
    src.beta = src.instance.boundary_section(omega0, backward_end(src.h0, src.xi0))
    return src


def load_source(cfg) -> Source:
    if cfg.instance_file:
        doc = ser.read_json(cfg.instance_file)
        if doc.get("kind") != "instance":
            raise ConfigError("instance file must hold an 'instance' document")
        try:
            A = ser.cocycle_from_json(doc["cocycle"])
            model = A.model
            B = ser.cocycle_from_json(doc["transfer"]) if doc.get("transfer") else None
            src = Source(A, CoboundaryInstance(A, B) if B is not None else None, origin="instance_file")
            if doc.get("alpha"):
                src.alpha = ser.section_from_json(doc["alpha"])
                src.beta = ser.section_from_json(doc["beta"])
                src.xi0 = model.boundary_from_json(doc["xi0"])
                src.h0 = model.point_from_json(doc["h0"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed instance file: {exc}") from exc
    elif cfg.cocycle_file:
        try:
            src = Source(ser.cocycle_from_json(ser.read_json(cfg.cocycle_file)), origin="cocycle_file")
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed cocycle file: {exc}") from exc
    else:
        src = generate_instance(cfg)
    _check_model(cfg, src.A)
    return src


# --- subcommands ---------------------------------------------------------------------

def cmd_verify_lemmas(cfg, out: Path, tol=None) -> tuple[dict, bool]:
    model = get_model(cfg.model)
    results = run_suites(model, cfg.instances, cfg.seed, cfg.eps, cfg.triples,
                         cfg.tolerances.geometry if tol is None else tol)
    passed = all(r.passed for r in results)
    report = {**_header("verify-lemmas", cfg), "suites": [r.to_dict() for r in results],
              "passed": passed}
    ser.write_csv(out / "verify_lemmas.csv", ["suite", "instances", "max_residual", "tol", "passed"],
                  [(r.name, r.instances, r.max_residual, r.tol, r.passed) for r in results])
    return report, passed


def cmd_ppo(cfg, out: Path, tol=None) -> tuple[dict, bool]:
    src = load_source(cfg)
    A = src.A
    tol = cfg.tolerances.ppo if tol is None else tol
    max_period = cfg.max_period or default_max_period(A.depth)
    rep = ppo_check(A, max_period, tol)
    brep = boundary_ppo_check(A, max_period, tol)
    expected = len(enumerate_periodic_orbits(max_period, A.m))
    rows = [(r.orbit, r.period, r.displacement) for r in rep.rows]
    ser.write_csv(out / "ppo.csv", ["orbit", "period", "displacement"], rows)
    passed = rep.passed and brep.passed
    report = {
        **_header("ppo", cfg), "source": src.origin, "max_period": max_period, "tol": tol,
        "orbits": len(rep.rows), "expected_orbits": expected,
        "max_displacement": rep.max_displacement,
        "boundary_max_displacement": brep.max_displacement,
        "failures": [{"orbit": r.orbit, "period": r.period, "displacement": r.displacement}
                     for r in rep.failures],
        "passed": passed,
    }
    return report, passed


def _load_psi(cfg):
    if cfg.psi_file:
        try:
            return ser.real_table_from_json(ser.read_json(cfg.psi_file)), None
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed psi file: {exc}") from exc
    psi, g = random_telescoped(cfg.seed, cfg.alphabet, cfg.livsic_source_depth)
    if cfg.livsic_perturbation:
        psi = psi.with_value(0, psi.values[0] + cfg.livsic_perturbation)
        g = None
    return psi, g


def cmd_livsic(cfg, out: Path, tol=None) -> tuple[dict, bool]:
    tol = cfg.tolerances.livsic if tol is None else tol
    psi, g = _load_psi(cfg)
    omega0, budget = transitive_point(cfg.livsic_depth, psi.m)
    sol = solve_livsic(psi, omega0, 0.0, cfg.livsic_depth, cfg.orbit_budget or budget, cfg.tau,
                       ppo_tol=tol, max_period=cfg.max_period, residual_tol=tol)
    ser.write_csv(out / "livsic_residuals.csv", ["transition", "residual"],
                  sol.residual.rows(psi.m, sol.depth))
    ser.write_json(out / "livsic_solution.json", ser.real_table_to_json(sol.u))
    report = {**_header("livsic", cfg), "solution": sol.summary(), "tol": tol}
    passed = sol.residual.passed
    if g is not None:
        gap = gap_to_ground_truth(sol, g)
        report["ground_truth_gap"] = gap
        passed = passed and gap <= sol.error_bound
    report["passed"] = passed
    return report, passed


def _sections_gap(model, s1, s2) -> float:
    return max(model.distance(a, b) for a, b in zip(s1.values, s2.values))


def cmd_reduce(cfg, out: Path, tol=None) -> tuple[dict, bool]:
    tols = cfg.tolerances
    inv_tol = tols.invariance if tol is None else tol
    src = load_source(cfg)
    A = src.A
    model = A.model
    p = _base_point(cfg, model)
    omega0, budget = transitive_point(cfg.depth, A.m)
    budget = cfg.orbit_budget or budget
    src = _with_sections(cfg, src, omega0)
    kw = dict(tau=cfg.tau, ppo_tol=tols.livsic, invariance_tol=inv_tol)
    res = build_interior_section(A, src.alpha, src.beta, omega0, src.h0, p, cfg.depth, budget, **kw)
    phi_h = phi_holder_report(A, src.alpha, res.phi, cfg.tau)
    fac = factor_check(A, src.alpha, res.phi, p, cfg.samples, int(_rng(cfg, 3).integers(2**31)))
    checks = {
        "invariance": {"value": res.invariance.max_residual, "tol": inv_tol},
        "factor": {"value": fac.max_residual, "tol": tols.factor},
        "livsic": {"value": res.u.residual.max_residual, "tol": tols.livsic},
        "phi_holder": {"value": phi_h.estimate, "tol": phi_h.bound},
    }
    extra = {}
    if src.instance is not None and src.instance.B is not None:
        truth = src.instance.interior_section(omega0, src.h0).lift(cfg.depth)
        checks["ground_truth"] = {"value": _sections_gap(model, res.s, truth), "tol": tols.gauge}
        if cfg.anchors >= 2:
            rng = _rng(cfg, 4)
            radius = 2 if model.exact else 1.5
            anchors = [src.h0] + [model.random_point(rng, p, radius) for _ in range(cfg.anchors - 1)]
            rec = reconstruct_B(A, omega0, anchors, src.instance.section_provider(omega0), src.xi0,
                                p, cfg.depth, budget, **kw)
            gaps = [_sections_gap(model, r.s, src.instance.interior_section(omega0, h).lift(cfg.depth))
                    for h, r in zip(anchors, rec.results)]
            checks["anchor_images"] = {"value": max(gaps), "tol": tols.gauge}
            checks["anchor_distances"] = {"value": rec.isometry_defect, "tol": tols.isometry}
            extra["anchors"] = [model.point_to_json(h) for h in anchors]
    for c in checks.values():
        c["passed"] = bool(c["value"] <= c["tol"])
    passed = all(c["passed"] for c in checks.values())
    ser.write_json(out / "reduce_result.json", ser.reduction_result_to_json(
        res, {"source": src.origin, "xi0": model.boundary_to_json(src.xi0), **extra}))
    L = 2 * cfg.depth + 2
    order = np.argsort(-res.invariance.residuals, kind="stable")
    ser.write_csv(out / "reduce_residuals.csv", ["transition", "invariance_residual"],
                  [(word_str(int(c), L, A.m), float(res.invariance.residuals[c])) for c in order])
    report = {**_header("reduce", cfg), "source": src.origin, "depth": cfg.depth,
              "orbit_budget": budget, "checks": checks, "error_budget": res.error_budget,
              "livsic": res.u.summary(), "passed": passed}
    return report, passed


def cmd_gen(cfg, out: Path, tol=None) -> tuple[dict, bool]:
    """Emit a hidden-coboundary instance with its invariant boundary sections."""
    if cfg.generator.kind not in ("coboundary", "identity"):
        raise ConfigError("gen emits coboundary instances; generator.kind must be coboundary or identity")
    src = generate_instance(cfg)
    omega0, _ = transitive_point(cfg.depth, cfg.alphabet)
    src = _with_sections(cfg, src, omega0)
    model = src.A.model
    doc = {
        "schema_version": ser.SCHEMA_VERSION, "kind": "instance", "model": model.name,
        "cocycle": ser.cocycle_to_json(src.A), "transfer": ser.cocycle_to_json(src.instance.B),
        "alpha": ser.section_to_json(src.alpha), "beta": ser.section_to_json(src.beta),
        "xi0": model.boundary_to_json(src.xi0), "h0": model.point_to_json(src.h0),
        "omega0": {"rule": "transitive", "depth": cfg.depth}, "generator": src.instance.meta,
    }
    ser.write_json(out / "instance.json", doc)
    ppo = ppo_check(src.A, tol=cfg.tolerances.ppo if tol is None else tol)
    report = {**_header("gen", cfg), "instance": "instance.json",
              "ppo_max_displacement": ppo.max_displacement, "passed": ppo.passed}
    return report, ppo.passed


COMMANDS = {"verify-lemmas": cmd_verify_lemmas, "ppo": cmd_ppo, "livsic": cmd_livsic,
            "reduce": cmd_reduce, "gen": cmd_gen}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="horolivsic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="JSON experiment config")
        sp.add_argument("--seed", type=int, help="64-bit seed overriding the config")
        sp.add_argument("--out", type=Path, help="output directory")
        sp.add_argument("--model", choices=["halfplane", "tree"])
        sp.add_argument("--tol", type=float, help=f"overrides the {TOL_FIELD[name]} tolerance")
        sp.add_argument("-v", "--verbose", action="store_true")
    return parser


def resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.model is not None:
        changes["model"] = args.model
    if args.out is not None:
        changes["out_dir"] = str(args.out)
    if args.tol is not None:
        if not args.tol > 0:
            raise ConfigError("--tol must be positive")
        changes["tolerances"] = dataclasses.replace(cfg.tolerances, **{TOL_FIELD[args.command]: args.tol})
    return cfg.replace(**changes) if changes else cfg


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    name = args.command
    report_name = name.replace("-", "_") + ".json"
    out = Path(args.out) if args.out else Path("out")
    try:
        cfg = resolve_config(args)
        out = Path(cfg.out_dir)
        report, passed = COMMANDS[name](cfg, out)
    except HoroLivsicError as exc:
        code = exit_code_for(exc)
        err = {"code": exc.code, "type": type(exc).__name__, "message": str(exc)}
        for attr in ("orbit", "value", "residual", "worst", "missing"):
            if getattr(exc, attr, None) is not None:
                err[attr] = getattr(exc, attr)
        ser.write_json(out / report_name, {"schema_version": ser.SCHEMA_VERSION, "command": name,
                                           "status": "error", "exit_code": code, "error": err})
        print(f"{name}: {exc.code}: {exc}", file=sys.stderr)
        return code
    code = EXIT_PASS if passed else EXIT_NUMERICAL
    report["status"] = "pass" if passed else "fail"
    report["exit_code"] = code
    ser.write_json(out / report_name, report)
    print(f"{name}: {report['status']} -> {out / report_name}")
    return code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
