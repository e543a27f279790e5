"""From invariant boundary sections to invariant interior sections.

Given a cocycle ``A`` and an ``A^*``-invariant boundary section ``alpha``,
the Busemann level ``-b_{p,alpha(omega)}(h)`` turns the skew product into a
translation cocycle ``t -> t + phi(omega)``.  Solving the real cohomological
equation for ``phi`` picks one horosphere per cylinder; intersecting it with
the line from ``beta(omega)`` to ``alpha(omega)`` gives an invariant section.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .base_dynamics import (BasePoint, central_code, n_words, subcode, transition_codes,
                            transitive_point, word_str)
from .cocycles import (Cocycle, Section, evaluate, holder_busemann_moving, holder_estimate,
                       ppo_check, scalar_holder_sup)
from .errors import (BracketError, DomainError, EndpointCollisionError, InvarianceError,
                     ObstructionError)
from .geometry import backward_end
from .livsic import RealSolution, RealTable, solve_livsic

BRACKET = 50.0
ROOT_TOL = 1e-10
BUSEMANN_EVAL_ERROR = 1e-12


@dataclass(frozen=True)
class HoroCocycle:
    """The translation cocycle ``phi(w) = -b_{p, alpha(T w)}(A(w) p)``."""

    table: RealTable
    p: object
    provenance: dict = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return self.table.depth

    @property
    def m(self) -> int:
        return self.table.m


@dataclass(frozen=True)
class InvarianceReport:
    max_residual: float
    worst_transition: str
    transitions: int
    tol: float
    residuals: np.ndarray = field(repr=False, compare=False)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def _boundary_gap(model, xi, eta) -> float:
    if model.exact:
        return 0.0 if xi == eta else 1.0
    return xi.chart_distance(eta)


def boundary_invariance(A: Cocycle, alpha: Section, tol: float = 1e-9) -> InvarianceReport:
    """``sup`` over transitions of the gap between ``A^*(w) alpha(w)`` and ``alpha(T w)``."""
    model = A.model
    D = max(A.depth, alpha.depth)
    left, right = transition_codes(A.m, D)
    ca = central_code(left, D, A.depth, A.m)
    cl = central_code(left, D, alpha.depth, A.m)
    cr = central_code(right, D, alpha.depth, A.m)
    res = np.array([_boundary_gap(model, A.entries[a].apply_boundary(alpha.values[l]), alpha.values[r])
                    for a, l, r in zip(ca, cl, cr)])
    k = int(np.argmax(res))
    return InvarianceReport(float(res[k]), word_str(k, 2 * D + 2, A.m), len(res), tol, res)


def induce_phi(A: Cocycle, alpha: Section, p=None, tol: float = 1e-9, check: bool = True) -> HoroCocycle:
    """Tabulate ``phi`` on cylinders of depth ``max(depth A, depth alpha) + 1``."""
    model = A.model
    p = model.base_point() if p is None else p
    if check:
        inv = boundary_invariance(A, alpha, tol)
        if not inv.passed:
            raise InvarianceError(f"boundary section is not invariant: gap {inv.max_residual:.3e} "
                                  f"at transition {inv.worst_transition}",
                                  residual=inv.max_residual, worst=inv.worst_transition)
    D = max(A.depth, alpha.depth) + 1
    L = 2 * D + 1
    codes = np.arange(n_words(A.m, D), dtype=np.int64)
    ca = central_code(codes, D, A.depth, A.m)
    # alpha(T w) reads positions -r+1 .. r+1 of w
    cs = subcode(codes, L, D - alpha.depth + 1, 2 * alpha.depth + 1, A.m)
    cache: dict = {}
    vals = np.empty(len(codes))
    for k, (a, s) in enumerate(zip(ca, cs)):
        key = (int(a), int(s))
        if key not in cache:
            cache[key] = -model.busemann(p, alpha.values[s], A.entries[a].apply(p))
        vals[k] = cache[key]
    return HoroCocycle(RealTable(A.m, D, vals), p, {"cocycle_depth": A.depth, "section_depth": alpha.depth})


@dataclass(frozen=True)
class FactorReport:
    max_residual: float
    samples: int


def factor_check(A: Cocycle, alpha: Section, phi: HoroCocycle, p=None, samples: int = 1000,
                 seed: int = 0, radius: float = 3.0) -> FactorReport:
    """``max |-b_{p,alpha(T w)}(A(w) h) - (-b_{p,alpha(w)}(h) + phi(w))|`` over random states."""
    model = A.model
    p = phi.p if p is None else p
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        omega = BasePoint.random(rng, A.m, radius=max(phi.depth, alpha.depth) + 2)
        h = model.random_point(rng, p, radius)
        lhs = -model.busemann(p, alpha(omega.shift(1)), evaluate(A, omega).apply(h))
        rhs = -model.busemann(p, alpha(omega), h) + phi.table(omega)
        worst = max(worst, abs(lhs - rhs))
    return FactorReport(float(worst), samples)


@dataclass(frozen=True)
class PhiHolder:
    estimate: float
    inverse_orbit_constant: float
    busemann_constant: float
    tau: float

    @property
    def bound(self) -> float:
        """Sum of the two constants; it dominates ``estimate`` level by level."""
        return self.inverse_orbit_constant + self.busemann_constant


def phi_holder_estimate(phi: HoroCocycle, tau: float = 1.0) -> float:
    """Exact ``sup |phi(w1) - phi(w2)| / d(w1, w2)^tau`` over cylinder pairs."""
    return scalar_holder_sup(phi.table.values, phi.m, phi.depth, tau)


def phi_holder_report(A: Cocycle, alpha: Section, phi: HoroCocycle, tau: float = 1.0) -> PhiHolder:
    """``phi``'s constant with the constants of ``A^{-1} p`` and of the Busemann
    values at ``A(w1)^{-1} p``, all over the same cylinder pairs."""
    D = max(A.depth, alpha.depth)
    p = phi.p
    c_inv = holder_estimate(A, [p], tau, depth=D, inverse=True)
    d_bus = holder_busemann_moving(A, alpha, p, tau, depth=D)
    return PhiHolder(phi_holder_estimate(phi, tau), c_inv, d_bus, tau)


# --- interior sections -------------------------------------------------------------

def _anchor_root(model, p, gamma) -> float:
    """Time ``t`` with ``b_{p,gamma(+inf)}(gamma(t)) = 0`` on ``[-BRACKET, BRACKET]``."""
    if model.exact:
        # Busemann functions drop at unit speed along lines towards their end,
        # so one evaluation fixes the integer function being bisected
        b0 = model.busemann_along(p, gamma, 0)
        f = lambda t: b0 - t
        lo, hi = -int(BRACKET), int(BRACKET)
        flo, fhi = f(lo), f(hi)
        if flo < 0 or fhi > 0:
            raise BracketError(f"Busemann anchor not bracketed: f({lo})={flo}, f({hi})={fhi}")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if f(mid) >= 0:
                lo = mid
            else:
                hi = mid
        t = lo if f(lo) == 0 else hi
        if f(t) != 0:
            raise BracketError("no vertex of the line lies on the level-0 horosphere")
        return float(t)
    f = lambda t: model.busemann_along(p, gamma, t)
    flo, fhi = f(-BRACKET), f(BRACKET)
    if not (flo > 0 > fhi):
        raise BracketError(f"Busemann anchor not bracketed: f(-{BRACKET})={flo:.3e}, f({BRACKET})={fhi:.3e}")
    return brentq(f, -BRACKET, BRACKET, xtol=ROOT_TOL, rtol=4 * np.finfo(float).eps)


def anchored_line(model, beta, alpha, p):
    """Line from ``beta`` to ``alpha`` with ``gamma(0)`` on the horosphere through ``p``.

    Returns the line and the shift from the foot of ``p`` to the anchor.
    """
    if model.boundary_equal(alpha, beta):
        raise EndpointCollisionError("alpha and beta coincide on a cylinder")
    gamma = model.geodesic_between_boundary(beta, alpha, p)
    t0 = _anchor_root(model, p, gamma)
    return gamma.reanchor(t0), t0


def _apply_many(model, gs, hs):
    if model.exact:
        return [g.apply(h) for g, h in zip(gs, hs)]
    a = np.array([g.a for g in gs]); b = np.array([g.b for g in gs])
    c = np.array([g.c for g in gs]); d = np.array([g.d for g in gs])
    z = np.array([h.x for h in hs]) + 1j * np.array([h.y for h in hs])
    return (a * z + b) / (c * z + d)


def verify_invariance(s: Section, A: Cocycle, tol: float = 1e-6) -> InvarianceReport:
    """``sup`` over cylinder transitions of ``d(A(w) s(w), s(T w))``."""
    model = A.model
    D = max(s.depth, A.depth)
    left, right = transition_codes(A.m, D)
    ca = central_code(left, D, A.depth, A.m)
    cl = central_code(left, D, s.depth, A.m)
    cr = central_code(right, D, s.depth, A.m)
    if model.exact:
        res = np.array([model.distance(A.entries[a].apply(s.values[l]), s.values[r])
                        for a, l, r in zip(ca, cl, cr)], dtype=float)
    else:
        w = _apply_many(model, [A.entries[a] for a in ca], [s.values[l] for l in cl])
        tx = np.array([s.values[r].x for r in cr]); ty = np.array([s.values[r].y for r in cr])
        res = 2.0 * np.arcsinh(np.abs(w - (tx + 1j * ty)) / (2.0 * np.sqrt(w.imag * ty)))
    k = int(np.argmax(res))
    return InvarianceReport(float(res[k]), word_str(k, 2 * D + 2, A.m), len(res), tol, res)


@dataclass(frozen=True)
class ReductionResult:
    s: Section
    u: RealSolution
    alpha: Section
    beta: Section
    phi: HoroCocycle
    anchor_times: np.ndarray
    invariance: InvarianceReport
    omega0: BasePoint
    h0: object
    p: object
    error_budget: dict

    @property
    def depth(self) -> int:
        return self.s.depth


def build_interior_section(A: Cocycle, alpha: Section, beta: Section, omega0: BasePoint | None = None,
                           h0=None, p=None, depth: int = 6, orbit_budget: int | None = None,
                           tau: float = 1.0, check_ppo: bool = True, ppo_tol: float = 1e-8,
                           invariance_tol: float = 1e-6, boundary_tol: float = 1e-9) -> ReductionResult:
    """Invariant interior section through ``(omega0, h0)``.

    ``alpha`` and ``beta`` must be invariant boundary sections with
    ``alpha != beta`` on every cylinder; ``omega0`` defaults to the
    transitive point of ``depth``.
    """
    model = A.model
    p = model.base_point() if p is None else p
    h0 = p if h0 is None else h0
    if omega0 is None:
        omega0, horizon = transitive_point(depth, A.m)
        orbit_budget = horizon if orbit_budget is None else orbit_budget
    if check_ppo:
        rep = ppo_check(A, tol=ppo_tol)
        if not rep.passed:
            w = rep.worst()
            raise ObstructionError(f"A^n(omega*) moves the probes by {w.displacement:.3e} at {w.orbit}",
                                   orbit=w.orbit, value=w.displacement)
    for sec in (alpha, beta):
        inv = boundary_invariance(A, sec, boundary_tol)
        if not inv.passed:
            raise InvarianceError(f"boundary section is not invariant: gap {inv.max_residual:.3e} "
                                  f"at transition {inv.worst_transition}",
                                  residual=inv.max_residual, worst=inv.worst_transition)
    phi = induce_phi(A, alpha, p, check=False)
    if depth < max(phi.depth, alpha.depth, beta.depth):
        raise DomainError(f"depth {depth} is below the depth {phi.depth} of the translation cocycle")
    u0 = -model.busemann(p, alpha(omega0), h0)
    sol = solve_livsic(phi.table, omega0, u0, depth, orbit_budget, tau, ppo_tol=ppo_tol)
    al, be = alpha.lift(depth), beta.lift(depth)
    points, times = [], np.empty(len(al.values))
    for k, (a, b) in enumerate(zip(al.values, be.values)):
        gamma, times[k] = anchored_line(model, b, a, p)
        t = sol.u.values[k]
        if model.exact:
            t = float(round(t))
        points.append(gamma(t))
    s = Section(A.m, depth, tuple(points), "interior", model.name)
    inv = verify_invariance(s, A, invariance_tol)
    budget = {
        "busemann_evaluation": 0.0 if model.exact else BUSEMANN_EVAL_ERROR,
        "livsic_tabulation": sol.tabulation_bound,
        "livsic_roundoff": sol.roundoff_bound,
        "root_solve": 0.0 if model.exact else ROOT_TOL,
    }
    return ReductionResult(s, sol, al, be, phi, times, inv, omega0, h0, p, budget)


@dataclass(frozen=True)
class UniquenessReport:
    max_gap: float
    worst_cylinder: str


def uniqueness_check(s1: Section, s2: Section, A: Cocycle | None = None) -> UniquenessReport:
    """``max_w d(s1(w), s2(w))`` on a common depth."""
    model = s1.model
    d = max(s1.depth, s2.depth)
    a, b = s1.lift(d), s2.lift(d)
    gaps = [model.distance(x, y) for x, y in zip(a.values, b.values)]
    k = int(np.argmax(gaps))
    return UniquenessReport(float(gaps[k]), word_str(k, 2 * d + 1, s1.m))


# --- transfer function --------------------------------------------------------------

def fit_isometry(model, anchors, images):
    """Half-plane isometry sending the first two anchors to their images."""
    if model.exact:
        raise DomainError("tree isometries are not determined by two vertices")
    F = model.geodesic_between(anchors[0], anchors[1]).frame
    G = model.geodesic_between(images[0], images[1]).frame
    return G @ F.inverse()


@dataclass(frozen=True)
class Reconstruction:
    anchors: tuple
    results: tuple                 # one ReductionResult per anchor
    images: tuple                  # images[j][w] = B(w) anchors[j]
    isometries: tuple | None       # fitted B(w) (half-plane)
    invariance_residual: float
    isometry_defect: float
    omega0: BasePoint
    depth: int

    def image(self, j: int, code: int):
        return self.images[j][int(code)]


def reconstruct_B(A: Cocycle, omega0: BasePoint | None, anchors, section_provider, alpha0,
                  p=None, depth: int = 6, orbit_budget: int | None = None, **kwargs) -> Reconstruction:
    """Sample the transfer function ``B(w) h = s_{omega0, h}(w)`` at each anchor ``h``.

    ``section_provider(xi)`` must return the invariant boundary section through
    ``(omega0, xi)``.  Every anchor uses the section through ``alpha0`` and the
    section through the backward end of the line from the anchor to ``alpha0``.
    """
    model = A.model
    p = model.base_point() if p is None else p
    if omega0 is None:
        omega0, horizon = transitive_point(depth, A.m)
        orbit_budget = horizon if orbit_budget is None else orbit_budget
    anchors = tuple(anchors)
    alpha = section_provider(alpha0)
    results = []
    for h in anchors:
        beta = section_provider(backward_end(h, alpha(omega0)))
        results.append(build_interior_section(A, alpha, beta, omega0, h, p, depth, orbit_budget, **kwargs))
    images = tuple(r.s.values for r in results)
    inv = max(r.invariance.max_residual for r in results)
    n = n_words(A.m, depth)
    defect = 0.0
    for i in range(len(anchors)):
        for j in range(i + 1, len(anchors)):
            d0 = model.distance(anchors[i], anchors[j])
            for w in range(n):
                defect = max(defect, abs(model.distance(images[i][w], images[j][w]) - d0))
    isos = None
    if not model.exact and len(anchors) >= 2:
        isos = tuple(fit_isometry(model, anchors, [images[0][w], images[1][w]]) for w in range(n))
    return Reconstruction(anchors, tuple(results), images, isos, inv, defect, omega0, depth)


def boundary_section_from_interior(s_p: Section, s_pbar: Section) -> Section:
    """Forward end of the ray from ``s_p(w)`` through ``s_pbar(w)`` (half-plane)."""
    model = s_p.model
    if model.exact:
        raise DomainError("in a tree a ray through two vertices does not determine an end")
    d = max(s_p.depth, s_pbar.depth)
    a, b = s_p.lift(d), s_pbar.lift(d)
    ends = tuple(model.geodesic_between(x, y).forward_end for x, y in zip(a.values, b.values))
    return Section(s_p.m, d, ends, "boundary", model.name)


__all__ = [
    "HoroCocycle", "InvarianceReport", "FactorReport", "PhiHolder", "ReductionResult",
    "UniquenessReport", "Reconstruction", "boundary_invariance", "induce_phi", "factor_check",
    "phi_holder_estimate", "phi_holder_report", "anchored_line", "verify_invariance",
    "build_interior_section", "uniqueness_check", "fit_isometry", "reconstruct_B",
    "boundary_section_from_interior",
]
