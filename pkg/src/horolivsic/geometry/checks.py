"""Randomised verification suites for the geometric identities the rest of
the package relies on.  Each suite returns a :class:`SuiteResult` carrying the
worst residual it saw; the CLI writes these into its reports.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import (HALFPLANE, boundary_metric, busemann, busemann_limit, distance,
               geodesic_between, gromov_product, model_of)
from .tree import TreeEnd


@dataclass(frozen=True)
class SuiteResult:
    name: str
    model: str
    instances: int
    max_residual: float
    tol: float
    passed: bool
    detail: dict | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _result(name, model, instances, residual, tol, detail=None) -> SuiteResult:
    residual = float(residual)
    return SuiteResult(name, model.name, int(instances), residual, float(tol),
                       bool(residual <= tol), detail)


def _random_line(model, rng, alpha):
    """Line towards ``alpha`` re-anchored so ``gamma(0)`` is on the level-0 horosphere."""
    p = model.base_point()
    line = model.line_through(model.random_point(rng), alpha)
    return line.reanchor(busemann(p, alpha, line(0)))


def busemann_along_geodesic(model, instances=100, seed=0, tol=1e-8) -> SuiteResult:
    """``b_{p,alpha}(gamma(s)) = -s`` on lines towards ``alpha`` anchored at level 0."""
    rng = np.random.default_rng(seed)
    p = model.base_point()
    times = np.arange(-10, 11) if model.exact else np.linspace(-10.0, 10.0, 41)
    worst = 0.0
    for _ in range(instances):
        alpha = model.random_boundary(rng)
        gamma = _random_line(model, rng, alpha)
        for s in times:
            worst = max(worst, abs(busemann(p, alpha, gamma(float(s))) + s))
    return _result("busemann_along_geodesic", model, instances, worst, tol)


def busemann_equivariance(model, instances=100, seed=0, tol=1e-8) -> SuiteResult:
    """``b_{p, A alpha}(A p) = -b_{p, alpha}(A^{-1} p)``."""
    rng = np.random.default_rng(seed)
    p = model.base_point()
    worst = 0.0
    for _ in range(instances):
        A = model.random_isometry(rng, 2.0)
        alpha = model.random_boundary(rng)
        lhs = busemann(p, A.apply_boundary(alpha), A.apply(p))
        rhs = -busemann(p, alpha, A.inverse().apply(p))
        worst = max(worst, abs(lhs - rhs))
    return _result("busemann_equivariance", model, instances, worst, tol)


def busemann_lipschitz(model, instances=100, seed=0, tol=1e-9) -> SuiteResult:
    """``|b(h) - b(g)| <= d(h, g)``; the residual is the worst excess."""
    rng = np.random.default_rng(seed)
    p = model.base_point()
    worst = 0.0
    for _ in range(instances):
        alpha = model.random_boundary(rng)
        h, g = model.random_point(rng), model.random_point(rng)
        excess = abs(busemann(p, alpha, h) - busemann(p, alpha, g)) - model.distance(h, g)
        worst = max(worst, excess)
    return _result("busemann_lipschitz", model, instances, worst, tol)


def busemann_base_change(model, instances=100, seed=0, tol=1e-8) -> SuiteResult:
    """``b_{p1,alpha}(h) = b_{p2,alpha}(h) + b_{p1,alpha}(p2)``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(instances):
        alpha = model.random_boundary(rng)
        p1, p2, h = (model.random_point(rng) for _ in range(3))
        r = busemann(p1, alpha, h) - busemann(p2, alpha, h) - busemann(p1, alpha, p2)
        worst = max(worst, abs(r))
    return _result("busemann_base_change", model, instances, worst, tol)


def boundary_action_composition(model, instances=100, seed=0, tol=1e-9) -> SuiteResult:
    """``(A B)^* = A^* B^*`` on random boundary points."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(instances):
        A, B = model.random_isometry(rng, 2.0), model.random_isometry(rng, 2.0)
        xi = model.random_boundary(rng)
        lhs = (A @ B).apply_boundary(xi)
        rhs = A.apply_boundary(B.apply_boundary(xi))
        if model.exact:
            worst = max(worst, 0.0 if lhs == rhs else 1.0)
        else:
            worst = max(worst, lhs.chart_distance(rhs))
    return _result("boundary_action_composition", model, instances, worst, tol)


def _faithfulness_probes(model, g):
    if not model.exact:
        return [HALFPLANE.boundary_probes()[k] for k in (0, 1, 3)]
    # ends (w)(ab)^inf for every short w: an automorphism fixing all of them
    # fixes every vertex of depth <= len(g.word) + 2, hence the root's link
    n = len(g.word) + 2
    out, frontier = [], [()]
    for _ in range(n + 1):
        nxt = []
        for w in frontier:
            for a in range(3):
                if w and w[-1] == a:
                    continue
                b = (a + 1) % 3
                out.append(TreeEnd(w, (a, b)))
                nxt.append(w + (a,))
        frontier = nxt
    return out


def boundary_action_faithful(model, instances=100, seed=0, tol=0.0) -> SuiteResult:
    """A non-identity isometry moves at least one boundary probe.

    The residual counts isometries that fix every probe.
    """
    rng = np.random.default_rng(seed)
    failures = 0
    tested = 0
    for _ in range(instances):
        g = model.random_isometry(rng, 2.0)
        if g.is_identity():
            continue
        tested += 1
        moved = any(not model.boundary_equal(g.apply_boundary(xi), xi)
                    for xi in _faithfulness_probes(model, g))
        failures += not moved
    return _result("boundary_action_faithful", model, tested, failures, tol)


def busemann_fast_path(model, instances=100, seed=0, tol=1e-7) -> SuiteResult:
    """Closed-form Busemann value against the limit definition."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(instances):
        alpha = model.random_boundary(rng)
        p, h = model.random_point(rng), model.random_point(rng)
        n = 30 + int(model.distance(p, h)) if model.exact else 30
        worst = max(worst, abs(busemann(p, alpha, h) - busemann_limit(p, alpha, h, n).value))
    return _result("busemann_fast_path", model, instances, worst, tol)


def boundary_lipschitz(model, instances=100, seed=0, eps=1.0, pairs=50) -> SuiteResult:
    """Measured Lipschitz ratio of ``A^*`` for the boundary metric.

    The ratio ``rho(A xi, A eta) / rho(xi, eta)`` is reported per isometry;
    the residual is the worst excess of ``log ratio`` over ``eps d(p, A p)``,
    which bounds it because Gromov products move by at most ``d(p, A^{-1} p)``.
    """
    rng = np.random.default_rng(seed)
    p = model.base_point()
    worst_excess = -math.inf
    worst_ratio = 0.0
    for _ in range(instances):
        A = model.random_isometry(rng, 2.0)
        bound = eps * model.distance(p, A.apply(p))
        for _ in range(pairs):
            xi, eta = model.random_boundary(rng), model.random_boundary(rng)
            r0 = boundary_metric(xi, eta, p, eps)
            if r0 == 0.0:
                continue
            r1 = boundary_metric(A.apply_boundary(xi), A.apply_boundary(eta), p, eps)
            ratio = r1 / r0
            worst_ratio = max(worst_ratio, ratio)
            worst_excess = max(worst_excess, math.log(ratio) - bound)
    return _result("boundary_lipschitz", model, instances, max(worst_excess, 0.0), 1e-9,
                   {"max_ratio": worst_ratio})


@dataclass(frozen=True)
class HyperbolicityReport:
    violations: int
    worst_margin: float
    samples: int


def _hp_triples(rng, samples, radius):
    out = []
    for _ in range(3):
        theta = rng.uniform(0, 2 * math.pi, samples)
        r = rng.uniform(0, radius, samples)
        # point at distance r from i in direction theta
        ch, sh = np.cosh(r), np.sinh(r)
        y = 1.0 / (ch - sh * np.cos(theta))
        x = sh * np.sin(theta) * y
        out.append((x, y))
    return out


def _hp_dist(a, b):
    (x1, y1), (x2, y2) = a, b
    return 2.0 * np.arcsinh(np.hypot(x1 - x2, y1 - y2) / (2.0 * np.sqrt(y1 * y2)))


def strong_hyperbolicity_check(model, eps=1.0, samples=10_000, seed=0, radius=6.0,
                               slack_tol=1e-12) -> HyperbolicityReport:
    """Sample the triangle inequality for ``exp(-eps (x, y)_p)`` on interior triples."""
    rng = np.random.default_rng(seed)
    if model.exact:
        p = model.base_point()
        margins = np.empty(samples)
        for k in range(samples):
            x, y, z = (model.random_point(rng, radius=int(radius)) for _ in range(3))
            rho = lambda a, b: math.exp(-eps * gromov_product(a, b, p))
            margins[k] = rho(x, z) + rho(y, z) - rho(x, y)
    else:
        x, y, z = _hp_triples(rng, samples, radius)
        p = (np.zeros(1), np.ones(1))
        dp = {k: _hp_dist(v, p) for k, v in (("x", x), ("y", y), ("z", z))}

        def rho(a, b, da, db):
            return np.exp(-eps * 0.5 * (da + db - _hp_dist(a, b)))

        margins = (rho(x, z, dp["x"], dp["z"]) + rho(y, z, dp["y"], dp["z"])
                   - rho(x, y, dp["x"], dp["y"]))
    return HyperbolicityReport(int(np.sum(margins < -slack_tol)), float(margins.min()), samples)


def slimness_estimate(x, y, z, grid: int = 64) -> float:
    """Smallest ``delta`` making the geodesic triangle ``xyz`` delta-slim, by gridding."""
    exact = model_of(x, y, z).exact
    sides = [geodesic_between(x, y), geodesic_between(y, z), geodesic_between(z, x)]
    worst = 0.0
    for k, side in enumerate(sides):
        others = [sides[j] for j in range(3) if j != k]
        if exact:
            ts = np.arange(0, int(side.t_max) + 1)
        else:
            ts = np.linspace(0.0, side.t_max, grid)
        for t in ts:
            q = side(float(t))
            worst = max(worst, min(o.distance_to(q) for o in others))
    return worst


def isometry_residual(model, pairs=10_000, seed=0) -> float:
    """Worst ``|d(g a, g b) - d(a, b)|`` over random isometries and pairs."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(pairs):
        g = model.random_isometry(rng, 2.0)
        a, b = model.random_point(rng), model.random_point(rng)
        worst = max(worst, abs(distance(g.apply(a), g.apply(b)) - distance(a, b)))
    return worst


def busemann_limit_convergence(p, alpha, h, ns=(1, 2, 4, 8)) -> list[float]:
    """``|estimate(n) - estimate(2n)|`` for each ``n`` in ``ns``."""
    out = []
    for n in ns:
        a = busemann_limit(p, alpha, h, n).value
        b = busemann_limit(p, alpha, h, 2 * n).value
        out.append(abs(a - b))
    return out


SUITES = {
    "busemann_along_geodesic": busemann_along_geodesic,
    "busemann_equivariance": busemann_equivariance,
    "busemann_lipschitz": busemann_lipschitz,
    "busemann_base_change": busemann_base_change,
    "boundary_action_composition": boundary_action_composition,
    "boundary_action_faithful": boundary_action_faithful,
    "busemann_fast_path": busemann_fast_path,
    "boundary_lipschitz": boundary_lipschitz,
}


def run_suites(model, instances=100, seed=0, eps=1.0, triples=10_000, tol=None) -> list[SuiteResult]:
    """Run every suite.  Integer models are held to exact zeros; ``tol``
    overrides the per-suite defaults otherwise."""
    if model.exact:
        tol = 0.0
    out = []
    for k, (name, fn) in enumerate(SUITES.items()):
        kw = {"instances": instances, "seed": seed + k}
        if tol is not None and name != "boundary_lipschitz":
            kw["tol"] = tol
        elif name == "boundary_lipschitz":
            kw["eps"] = eps
        out.append(fn(model, **kw))
    rep = strong_hyperbolicity_check(model, eps=eps, samples=triples, seed=seed)
    out.append(SuiteResult("strong_hyperbolicity", model.name, rep.samples, float(rep.violations),
                           0.0, rep.violations == 0, {"worst_margin": rep.worst_margin, "eps": eps}))
    return out


__all__ = ["SuiteResult", "HyperbolicityReport", "SUITES", "run_suites",
           "strong_hyperbolicity_check", "slimness_estimate", "isometry_residual",
           "busemann_limit_convergence", *SUITES]
