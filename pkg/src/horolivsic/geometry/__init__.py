"""Model-agnostic geometry operations.

Every function dispatches on the type of its arguments to one of the two
models, so callers can write code once for the half-plane and the tree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import DomainError
from .halfplane import (HalfPlane, HPBoundary, HPGeodesic, HPPoint, I, Mobius,
                        frame_at, _affine_frame)
from .tree import ROOT, Tree, TreeEnd, TreeGeodesic, TreeIsometry, TreeVertex

HALFPLANE = HalfPlane()
TREE = Tree()
MODELS = {"halfplane": HALFPLANE, "tree": TREE}

N_MAX = 30

_HP_TYPES = (HPPoint, HPBoundary, Mobius, HPGeodesic)
_TREE_TYPES = (TreeVertex, TreeEnd, TreeIsometry, TreeGeodesic)


def get_model(name: str):
    try:
        return MODELS[name]
    except KeyError:
        raise DomainError(f"unknown model {name!r}; expected one of {sorted(MODELS)}") from None


def model_of(*objs):
    """The model all ``objs`` belong to; mixing models is a domain error."""
    found = None
    for obj in objs:
        if isinstance(obj, _HP_TYPES):
            m = HALFPLANE
        elif isinstance(obj, _TREE_TYPES):
            m = TREE
        else:
            raise DomainError(f"{type(obj).__name__} is not a geometry object")
        if found is not None and m is not found:
            raise DomainError("arguments belong to different models")
        found = m
    return found


def distance(a, b) -> float:
    return model_of(a, b).distance(a, b)


def geodesic_between(a, b):
    return model_of(a, b).geodesic_between(a, b)


def ray_to_boundary(a, alpha):
    return model_of(a, alpha).ray_to_boundary(a, alpha)


def geodesic_between_boundary(beta, alpha, p=None):
    model = model_of(beta, alpha)
    return model.geodesic_between_boundary(beta, alpha, model.base_point() if p is None else p)


def gromov_product(x, y, p) -> float:
    """``(x, y)_p = (d(x,p) + d(y,p) - d(x,y)) / 2``."""
    model = model_of(x, y, p)
    return 0.5 * (model.distance(x, p) + model.distance(y, p) - model.distance(x, y))


@dataclass(frozen=True)
class LimitValue:
    """A limit evaluated at ``n`` with the change since ``n / 2``."""

    value: float
    n: int
    change: float


def gromov_product_boundary_limit(xi, eta, p, n_max: int = N_MAX) -> LimitValue:
    """``(xi, eta)_p`` as the limit of products of points along the rays from ``p``."""
    model = model_of(xi, eta, p)
    if model.boundary_equal(xi, eta):
        return LimitValue(math.inf, n_max, 0.0)
    r1, r2 = model.ray_to_boundary(p, xi), model.ray_to_boundary(p, eta)

    def at(n):
        return gromov_product(r1(n), r2(n), p)

    v = at(n_max)
    return LimitValue(float(v), n_max, abs(v - at(n_max // 2)))


def gromov_product_boundary(xi, eta, p, n_max: int = N_MAX) -> float:
    return gromov_product_boundary_limit(xi, eta, p, n_max).value


def gromov_product_boundary_exact(xi, eta, p) -> float:
    """Closed form: ``-log`` of the chart distance after moving ``p`` to ``i``
    (half-plane), or the length of the common prefix seen from ``p`` (tree)."""
    model = model_of(xi, eta, p)
    if model is TREE:
        return TREE.gromov_boundary_boundary(xi, eta, p)
    g = _affine_frame(p).inverse()
    s = g.apply_boundary(xi).chart_distance(g.apply_boundary(eta))
    return math.inf if s <= 1e-300 else -math.log(s)


def gromov_point_boundary(alpha, x, h) -> float:
    """``(alpha, x)_h``."""
    return model_of(alpha, x, h).gromov_point_boundary(alpha, x, h)


def busemann(p, alpha, h) -> float:
    """``b_{p,alpha}(h) = 2 (alpha, p)_h - d(p, h)``: normalised so ``b(p) = 0``
    and decreasing towards ``alpha``."""
    return model_of(p, alpha, h).busemann(p, alpha, h)


def busemann_limit(p, alpha, h, n_max: int = N_MAX) -> LimitValue:
    """``lim d(x_n, h) - d(x_n, p)`` along the ray ``x_n`` from ``p`` to ``alpha``."""
    model = model_of(p, alpha, h)
    ray = model.ray_to_boundary(p, alpha)

    def at(n):
        x = ray(n)
        return model.distance(x, h) - model.distance(x, p)

    v = at(n_max)
    return LimitValue(float(v), n_max, abs(v - at(n_max // 2)))


def boundary_metric(xi, eta, p, eps: float = 1.0) -> float:
    """``exp(-eps (xi, eta)_p)``; zero exactly when ``xi == eta``."""
    g = gromov_product_boundary_exact(xi, eta, p)
    return 0.0 if math.isinf(g) else math.exp(-eps * g)


def interior_metric(x, y, p, eps: float = 1.0) -> float:
    """``exp(-eps (x, y)_p)`` on interior points."""
    return math.exp(-eps * gromov_product(x, y, p))


def backward_end(h, alpha):
    return model_of(h, alpha).backward_end(h, alpha)


def line_through(h, alpha):
    return model_of(h, alpha).line_through(h, alpha)


def apply_isometry(g, a):
    return model_of(g, a).apply(g, a)


def boundary_action(g, xi):
    return model_of(g, xi).apply_boundary(g, xi)


def boundary_equal(xi, eta, tol: float = 1e-9) -> bool:
    return model_of(xi, eta).boundary_equal(xi, eta, tol)


def compose(*gs):
    out = gs[0]
    for g in gs[1:]:
        out = out @ g
    return out


def isometries_equal(g1, g2, tol: float = 1e-9) -> bool:
    """Whether two isometries act identically (modulo sign in the half-plane)."""
    model_of(g1, g2)
    return (g1.inverse() @ g2).is_identity(tol)


@dataclass(frozen=True)
class Horosphere:
    """Level set ``{h : b_{p,alpha}(h) = level}``."""

    p: object
    alpha: object
    level: float = 0.0

    def value(self, h) -> float:
        return busemann(self.p, self.alpha, h) - self.level

    def contains(self, h, tol: float = 1e-8) -> bool:
        return abs(self.value(h)) <= tol

    def point_on(self, line):
        """Intersection with a geodesic line whose forward end is ``alpha``.

        Moving time ``s`` towards ``alpha`` lowers the Busemann value by ``s``,
        so the crossing time is read off from one evaluation.
        """
        t = busemann(self.p, self.alpha, line(0)) - self.level
        if isinstance(line, TreeGeodesic):
            if abs(t - round(t)) > 0:
                raise DomainError("horosphere level is not attained at a vertex")
            t = round(t)
        return line(t)


__all__ = [
    "HALFPLANE", "TREE", "MODELS", "N_MAX", "I", "ROOT",
    "HalfPlane", "Tree", "HPPoint", "HPBoundary", "HPGeodesic", "Mobius",
    "TreeVertex", "TreeEnd", "TreeIsometry", "TreeGeodesic", "frame_at",
    "get_model", "model_of", "distance", "geodesic_between", "ray_to_boundary",
    "geodesic_between_boundary", "gromov_product", "gromov_product_boundary",
    "gromov_product_boundary_limit", "gromov_product_boundary_exact",
    "gromov_point_boundary", "busemann", "busemann_limit", "boundary_metric",
    "interior_metric", "backward_end", "line_through", "apply_isometry",
    "boundary_action", "boundary_equal", "compose", "isometries_equal",
    "Horosphere", "LimitValue",
]
