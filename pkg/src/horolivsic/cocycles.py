"""Locally constant cocycles by isometries over the full shift.

A cocycle of depth ``r`` is a table indexed by central words of length
``2r+1``; its value at a point is the entry of the point's central word.
Sections of the skew product (boundary points, interior points) use the same
tabulation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base_dynamics import (BasePoint, PeriodicOrbit, central_code, encode,
                            enumerate_periodic_orbits, n_words, sliding_codes)
from .errors import DomainError
from .geometry import HALFPLANE, TREE, Mobius, get_model


# --- tables ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Cocycle:
    """Isometry-valued table ``entries[code]`` over central words of ``depth``."""

    model_name: str
    m: int
    depth: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != n_words(self.m, self.depth):
            raise DomainError(f"expected {n_words(self.m, self.depth)} entries, got {len(self.entries)}")
        kind = self.model.isometry_type
        if not all(isinstance(g, kind) for g in self.entries):
            raise DomainError(f"entries must be {kind.__name__} instances")
        object.__setattr__(self, "entries", tuple(self.entries))

    @property
    def model(self):
        return get_model(self.model_name)

    @classmethod
    def constant(cls, g, m: int = 2, model=None) -> "Cocycle":
        model = model or (HALFPLANE if isinstance(g, Mobius) else TREE)
        return cls(model.name, m, 0, (g,) * m)

    @classmethod
    def identity(cls, model=HALFPLANE, m: int = 2) -> "Cocycle":
        return cls.constant(model.identity(), m, model)

    @classmethod
    def from_function(cls, fn, model, m: int, depth: int) -> "Cocycle":
        """Tabulate ``fn(word)`` over all central words of ``depth``."""
        from .base_dynamics import decode
        L = 2 * depth + 1
        return cls(model.name, m, depth, tuple(fn(decode(c, L, m)) for c in range(n_words(m, depth))))

    def entry(self, code: int):
        return self.entries[int(code)]

    def lift(self, depth: int) -> "Cocycle":
        """The same cocycle tabulated on longer central words."""
        codes = central_code(np.arange(n_words(self.m, depth)), depth, self.depth, self.m)
        return Cocycle(self.model_name, self.m, depth, tuple(self.entries[c] for c in codes))

    def inverse(self) -> "Cocycle":
        """Pointwise inverse ``omega -> A(omega)^{-1}`` (not the inverse cocycle over ``T^{-1}``)."""
        return Cocycle(self.model_name, self.m, self.depth, tuple(g.inverse() for g in self.entries))

    def __call__(self, omega: BasePoint):
        return evaluate(self, omega)


@dataclass(frozen=True, eq=False)
class Section:
    """Table of values over depth-``depth`` cylinders.

    ``kind`` is ``"boundary"``, ``"interior"`` or ``"real"``.  A point is
    assigned the value of the cylinder of its central word.
    """

    m: int
    depth: int
    values: tuple
    kind: str
    model_name: str | None = None

    def __post_init__(self):
        if len(self.values) != n_words(self.m, self.depth):
            raise DomainError(f"expected {n_words(self.m, self.depth)} values, got {len(self.values)}")
        if self.kind not in ("boundary", "interior", "real"):
            raise DomainError(f"unknown section kind {self.kind!r}")
        object.__setattr__(self, "values", tuple(self.values))

    @property
    def model(self):
        return get_model(self.model_name)

    @classmethod
    def constant(cls, value, kind: str, model, m: int = 2) -> "Section":
        return cls(m, 0, (value,) * m, kind, model.name)

    def value(self, code: int):
        return self.values[int(code)]

    def __call__(self, omega: BasePoint):
        return self.values[omega.code(self.depth)]

    def lift(self, depth: int) -> "Section":
        codes = central_code(np.arange(n_words(self.m, depth)), depth, self.depth, self.m)
        return Section(self.m, depth, tuple(self.values[c] for c in codes), self.kind, self.model_name)

    def replace(self, code: int, value) -> "Section":
        vals = list(self.values)
        vals[int(code)] = value
        return Section(self.m, self.depth, tuple(vals), self.kind, self.model_name)


# --- evaluation and products -----------------------------------------------

def evaluate(A: Cocycle, omega: BasePoint):
    if omega.m != A.m:
        raise DomainError("cocycle and point use different alphabets")
    return A.entries[omega.code(A.depth)]


def orbit_codes(A_depth: int, m: int, omega: BasePoint, n: int) -> np.ndarray:
    """Central-word codes of ``omega, T omega, ..., T^{n-1} omega``."""
    r = A_depth
    return sliding_codes(omega.symbols(-r, n + r), 2 * r + 1, m)


def product_of_codes(A: Cocycle, codes):
    """``A(c_{n-1}) ... A(c_1) A(c_0)``."""
    out = A.model.identity()
    for c in codes:
        out = A.entries[int(c)] @ out
    return out


def dynamical_product(A: Cocycle, omega: BasePoint, n: int):
    """``A^n(omega) = A(T^{n-1} omega) ... A(T omega) A(omega)``; ``A^0`` is the identity."""
    if n < 0:
        raise DomainError("dynamical products are defined for n >= 0")
    if n == 0:
        return A.model.identity()
    return product_of_codes(A, orbit_codes(A.depth, A.m, omega, n))


def orbit_product(A: Cocycle, orbit: PeriodicOrbit):
    """``A^{n*}(omega*)`` around a periodic orbit."""
    return product_of_codes(A, orbit.window_codes(A.depth))


@dataclass(frozen=True)
class SkewState:
    base: BasePoint
    fiber: object


def skew_step(A: Cocycle, state: SkewState) -> SkewState:
    """``F(omega, h) = (T omega, A(omega) h)``."""
    return SkewState(state.base.shift(1), evaluate(A, state.base).apply(state.fiber))


def skew_iterate(A: Cocycle, state: SkewState, n: int) -> SkewState:
    for _ in range(n):
        state = skew_step(A, state)
    return state


@dataclass(frozen=True, eq=False)
class BoundaryCocycle:
    """The action ``A^*(omega)`` of a cocycle on the boundary."""

    cocycle: Cocycle

    def act(self, omega: BasePoint, xi):
        return evaluate(self.cocycle, omega).apply_boundary(xi)

    def act_code(self, code: int, xi):
        return self.cocycle.entries[int(code)].apply_boundary(xi)

    def iterate(self, omega: BasePoint, n: int, xi):
        """``(A^*)^n(omega) xi``, applying one boundary map per step."""
        for c in orbit_codes(self.cocycle.depth, self.cocycle.m, omega, n):
            xi = self.act_code(c, xi)
        return xi

    def orbit_iterate(self, orbit: PeriodicOrbit, xi):
        for c in orbit.window_codes(self.cocycle.depth):
            xi = self.act_code(c, xi)
        return xi


def boundary_cocycle(A: Cocycle) -> BoundaryCocycle:
    return BoundaryCocycle(A)


# --- periodic orbit obstruction ------------------------------------------------

def default_max_period(depth: int) -> int:
    """Periods up to ``4 depth + 1`` detect every obstruction of a depth-``depth`` table.

    In the de Bruijn graph on words of length ``2 depth`` pick forward paths
    ``Q(v)`` from a base vertex to ``v`` and ``R(v)`` back, both of length at
    most ``2 depth``.  If every closed walk of length ``<= 4 depth + 1`` has
    trivial product then ``Q(s) e R(t)`` and ``Q(v) R(v)`` are trivial, so each
    edge value equals ``G(t) G(s)^{-1}`` with ``G(v)`` the product along ``Q(v)``.
    """
    return 4 * depth + 1


@dataclass(frozen=True)
class OrbitDisplacement:
    orbit: str
    period: int
    displacement: float


@dataclass(frozen=True)
class PPOReport:
    rows: tuple
    tol: float
    max_period: int

    @property
    def max_displacement(self) -> float:
        return max((r.displacement for r in self.rows), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_displacement <= self.tol

    @property
    def failures(self) -> list:
        return [r for r in self.rows if r.displacement > self.tol]

    def worst(self) -> OrbitDisplacement | None:
        return max(self.rows, key=lambda r: r.displacement, default=None)


def ppo_check(A: Cocycle, max_period: int | None = None, tol: float = 1e-9, probes=None) -> PPOReport:
    """Displacement ``max_h d(A^{n*}(omega*) h, h)`` at every periodic orbit."""
    model = A.model
    probes = model.probe_set() if probes is None else list(probes)
    max_period = default_max_period(A.depth) if max_period is None else max_period
    rows = []
    for orbit in enumerate_periodic_orbits(max_period, A.m):
        g = orbit_product(A, orbit)
        disp = max(model.distance(g.apply(h), h) for h in probes)
        rows.append(OrbitDisplacement(orbit.label(), orbit.period, float(disp)))
    return PPOReport(tuple(rows), tol, max_period)


def boundary_ppo_check(A: Cocycle, max_period: int | None = None, tol: float = 1e-9, probes=None) -> PPOReport:
    """Boundary version: ``(A^*)^{n*}(omega*)`` must fix every boundary probe.

    Displacement is the chart distance (half-plane) or 0/1 (tree).
    """
    model = A.model
    probes = model.boundary_probes() if probes is None else list(probes)
    max_period = default_max_period(A.depth) if max_period is None else max_period
    Astar = boundary_cocycle(A)
    rows = []
    for orbit in enumerate_periodic_orbits(max_period, A.m):
        disp = 0.0
        for xi in probes:
            eta = Astar.orbit_iterate(orbit, xi)
            disp = max(disp, 0.0 if eta == xi else 1.0) if model.exact else max(disp, eta.chart_distance(xi))
        rows.append(OrbitDisplacement(orbit.label(), orbit.period, float(disp)))
    return PPOReport(tuple(rows), tol, max_period)


# --- Hoelder estimates -----------------------------------------------------------

def _level_keys(m: int, depth: int):
    """``keys[k][c]``: class of code ``c`` among words agreeing on ``|i| < k``."""
    codes = np.arange(n_words(m, depth), dtype=np.int64)
    keys = [np.zeros_like(codes)]
    for k in range(1, depth + 1):
        keys.append(central_code(codes, depth, k - 1, m))
    return keys


def scalar_holder_sup(values, m: int, depth: int, tau: float) -> float:
    """Exact ``sup |f(w1) - f(w2)| / d(w1, w2)^tau`` for a depth-``depth`` table.

    Words first differing at ``|i| = k`` are at distance ``2^-k``; the sup is
    the largest ``2^{k tau}`` times the spread of ``f`` over words agreeing
    on ``|i| < k``.
    """
    values = np.asarray(values, dtype=float)
    best = 0.0
    for k, key in enumerate(_level_keys(m, depth)):
        groups = int(key.max()) + 1
        hi = np.full(groups, -np.inf)
        lo = np.full(groups, np.inf)
        np.maximum.at(hi, key, values)
        np.minimum.at(lo, key, values)
        best = max(best, 2.0 ** (k * tau) * float(np.max(hi - lo)))
    return best


def _diameter(model, points) -> float:
    if model.exact:
        uniq = list(dict.fromkeys(points))
        return float(max((model.distance(a, b) for i, a in enumerate(uniq) for b in uniq[i + 1:]), default=0.0))
    return float(model.pairwise_distance(points, points).max())


def point_holder_sup(points, model, m: int, depth: int, tau: float) -> float:
    """Same sup for a table of model points with the hyperbolic distance."""
    best = 0.0
    for k, key in enumerate(_level_keys(m, depth)):
        level = 0.0
        for g in np.unique(key):
            idx = np.nonzero(key == g)[0]
            level = max(level, _diameter(model, [points[i] for i in idx]))
        best = max(best, 2.0 ** (k * tau) * level)
    return best


def holder_estimate(A: Cocycle, probes=None, tau: float = 1.0, depth: int | None = None,
                    inverse: bool = False) -> float:
    """``sup d(A(w1) h, A(w2) h) / d(w1, w2)^tau`` over word pairs and ``h`` in ``probes``.

    With ``inverse=True`` the images ``A(w)^{-1} h`` are used instead.
    """
    model = A.model
    probes = model.probe_set() if probes is None else list(probes)
    if not probes:
        raise DomainError("probe set must be nonempty")
    depth = A.depth if depth is None else depth
    table = A.lift(depth) if depth != A.depth else A
    maps = [g.inverse() for g in table.entries] if inverse else table.entries
    return max(point_holder_sup([g.apply(h) for g in maps], model, A.m, depth, tau) for h in probes)


def busemann_table(alpha: Section, p, h) -> np.ndarray:
    """``b_{p, alpha(w)}(h)`` for every cylinder ``w``."""
    model = alpha.model
    if model.exact:
        return np.array([model.busemann(p, a, h) for a in alpha.values], dtype=float)
    us = np.array([a.u for a in alpha.values])
    vs = np.array([a.v for a in alpha.values])
    return model.busemann_array(p, us, vs, h.x, h.y)


def holder_busemann_estimate(alpha: Section, p, probes=None, tau: float = 1.0,
                             depth: int | None = None) -> float:
    """``sup |b_{p,alpha(w1)}(h) - b_{p,alpha(w2)}(h)| / d(w1, w2)^tau`` over ``h`` in ``probes``."""
    model = alpha.model
    probes = model.probe_set(p) if probes is None else list(probes)
    if not probes:
        raise DomainError("probe set must be nonempty")
    depth = alpha.depth if depth is None else depth
    sec = alpha.lift(depth) if depth != alpha.depth else alpha
    return max(scalar_holder_sup(busemann_table(sec, p, h), alpha.m, depth, tau) for h in probes)


def holder_busemann_moving(A: Cocycle, alpha: Section, p, tau: float = 1.0,
                           depth: int | None = None) -> float:
    """``sup |b_{p,alpha(w1)}(h1) - b_{p,alpha(w2)}(h1)| / d^tau`` with ``h1 = A(w1)^{-1} p``.

    Both Busemann terms are evaluated at the point attached to the first word.
    """
    model = A.model
    depth = max(A.depth, alpha.depth) if depth is None else depth
    Ad = A.lift(depth) if depth != A.depth else A
    al = alpha.lift(depth) if depth != alpha.depth else alpha
    hs = [g.inverse().apply(p) for g in Ad.entries]
    if model.exact:
        M = np.array([[model.busemann(p, a, h) for a in al.values] for h in hs], dtype=float)
    else:
        us = np.array([a.u for a in al.values])[None, :]
        vs = np.array([a.v for a in al.values])[None, :]
        hx = np.array([h.x for h in hs])[:, None]
        hy = np.array([h.y for h in hs])[:, None]
        M = model.busemann_array(p, us, vs, hx, hy)
    gap = np.abs(M - np.diag(M)[:, None])  # gap[i, j] = |b_{alpha(w_j)}(h_i) - b_{alpha(w_i)}(h_i)|
    best = 0.0
    for k, key in enumerate(_level_keys(A.m, depth)):
        same = key[:, None] == key[None, :]
        best = max(best, 2.0 ** (k * tau) * float(np.max(np.where(same, gap, 0.0))))
    return best


# --- ground-truth coboundaries -------------------------------------------------

@dataclass(frozen=True, eq=False)
class CoboundaryInstance:
    """``A(omega) = B(T omega) B(omega)^{-1}`` with the transfer function kept."""

    A: Cocycle
    B: Cocycle
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def model(self):
        return self.A.model

    def gauge(self, omega0: BasePoint, code: int):
        """``B(w) B(omega0)^{-1}``, the transfer function normalised at ``omega0``."""
        return self.B.entries[int(code)] @ evaluate(self.B, omega0).inverse()

    def boundary_section(self, omega0: BasePoint, xi0) -> Section:
        """Invariant boundary section through ``(omega0, xi0)``."""
        B0inv = evaluate(self.B, omega0).inverse()
        vals = tuple((g @ B0inv).apply_boundary(xi0) for g in self.B.entries)
        return Section(self.B.m, self.B.depth, vals, "boundary", self.A.model_name)

    def interior_section(self, omega0: BasePoint, h0) -> Section:
        """Invariant interior section through ``(omega0, h0)``."""
        B0inv = evaluate(self.B, omega0).inverse()
        vals = tuple((g @ B0inv).apply(h0) for g in self.B.entries)
        return Section(self.B.m, self.B.depth, vals, "interior", self.A.model_name)

    def section_provider(self, omega0: BasePoint):
        """Callable ``xi -> boundary section through (omega0, xi)``."""
        return lambda xi: self.boundary_section(omega0, xi)


def make_coboundary_cocycle(B: Cocycle, seed: int | None = None) -> CoboundaryInstance:
    """Depth ``r+1`` cocycle ``A(w) = B(w[2:]) B(w[1:-1])^{-1}`` from a depth-``r`` table ``B``."""
    r, m = B.depth, B.m
    L = 2 * r + 3
    codes = np.arange(m**L, dtype=np.int64)
    shifted = codes % m ** (2 * r + 1)            # positions -r+1 .. r+1
    centre = (codes // m) % m ** (2 * r + 1)      # positions -r .. r
    inv = [g.inverse() for g in B.entries]
    entries = tuple(B.entries[s] @ inv[c] for s, c in zip(shifted, centre))
    return CoboundaryInstance(Cocycle(B.model_name, m, r + 1, entries), B, seed)


def random_cocycle(model, m: int, depth: int, rng: np.random.Generator, scale: float = 1.0) -> Cocycle:
    return Cocycle(model.name, m, depth, tuple(model.random_isometry(rng, scale) for _ in range(n_words(m, depth))))


def random_coboundary(model, m: int = 2, depth: int = 1, seed: int = 0, scale: float = 1.0) -> CoboundaryInstance:
    """Hidden-coboundary instance with a random depth-``depth`` transfer function."""
    rng = np.random.default_rng(seed)
    inst = make_coboundary_cocycle(random_cocycle(model, m, depth, rng, scale), seed)
    inst.meta.update({"generator": "random_coboundary", "model": model.name, "m": m,
                      "depth": depth, "seed": seed, "scale": scale})
    return inst


def code_of(word, m: int) -> int:
    return encode(word, m)


__all__ = [
    "Cocycle", "Section", "SkewState", "BoundaryCocycle", "CoboundaryInstance",
    "OrbitDisplacement", "PPOReport", "evaluate", "orbit_codes", "product_of_codes",
    "dynamical_product", "orbit_product", "skew_step", "skew_iterate",
    "boundary_cocycle", "default_max_period", "ppo_check", "boundary_ppo_check",
    "scalar_holder_sup", "point_holder_sup", "holder_estimate", "busemann_table",
    "holder_busemann_estimate", "holder_busemann_moving", "make_coboundary_cocycle",
    "random_cocycle", "random_coboundary", "code_of",
]
