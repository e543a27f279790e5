"""Poincare upper half-plane.

Boundary points are projective pairs ``[u:v]`` standing for ``u/v``; the pair
covers both the ``z`` chart (``v != 0``) and the ``-1/z`` chart around
infinity, so ``inf = [1:0]`` needs no special casing.  Geodesics are stored as
an SL(2,R) frame ``g`` with ``gamma(t) = g(i e^t)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateInputError, DomainError

DET_TOL = 1e-9
BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class HPPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)) or not self.y > 0:
            raise DomainError(f"({self.x}, {self.y}) is not in the upper half-plane")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True, eq=False)
class HPBoundary:
    """Point ``u/v`` of the extended real line, stored with ``u^2+v^2 = 1``."""

    u: float
    v: float

    def __post_init__(self):
        n = math.hypot(self.u, self.v)
        if not n > 0 or not math.isfinite(n):
            raise DomainError("boundary pair must be finite and nonzero")
        u, v = self.u / n, self.v / n
        if v < 0 or (v == 0 and u < 0):
            u, v = -u, -v
        object.__setattr__(self, "u", u + 0.0)
        object.__setattr__(self, "v", v + 0.0)

    @classmethod
    def from_real(cls, t: float) -> "HPBoundary":
        if math.isinf(t):
            return cls.infinity()
        return cls(t, 1.0)

    @classmethod
    def infinity(cls) -> "HPBoundary":
        return cls(1.0, 0.0)

    @property
    def value(self) -> float:
        return math.inf if self.v == 0 else self.u / self.v

    def chart_distance(self, other: "HPBoundary") -> float:
        """Sine of the angle between the two lines; a metric on RP^1."""
        return abs(self.u * other.v - self.v * other.u)

    def __eq__(self, other):
        if not isinstance(other, HPBoundary):
            return NotImplemented
        return self.chart_distance(other) <= BOUNDARY_TOL

    __hash__ = None

    def __repr__(self):
        return f"HPBoundary({self.value!r})"


@dataclass(frozen=True)
class Mobius:
    """Fractional-linear map ``z -> (a z + b)/(c z + d)`` with ``ad - bc = 1``."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if not abs(det - 1.0) <= DET_TOL:
            raise DomainError(f"matrix is not unimodular (det = {det!r})")

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def diag(cls, lam: float) -> "Mobius":
        """``diag(sqrt(lam), 1/sqrt(lam))``: ``z -> lam z``."""
        s = math.sqrt(lam)
        return cls(s, 0.0, 0.0, 1.0 / s)

    @classmethod
    def rotation(cls, theta: float) -> "Mobius":
        """Elliptic element fixing ``i``."""
        c, s = math.cos(theta), math.sin(theta)
        return cls(c, -s, s, c)

    @classmethod
    def translation(cls, t: float) -> "Mobius":
        return cls(1.0, t, 0.0, 1.0)

    @classmethod
    def from_array(cls, mat) -> "Mobius":
        (a, b), (c, d) = np.asarray(mat, dtype=float)
        return cls(float(a), float(b), float(c), float(d))

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def __matmul__(self, other: "Mobius") -> "Mobius":
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        # keep long products on SL(2,R)
        s = math.sqrt(a * d - b * c)
        return Mobius(a / s, b / s, c / s, d / s)

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def apply(self, p: HPPoint) -> HPPoint:
        z = p.z
        num = self.a * z + self.b
        den = self.c * z + self.d
        q = abs(den) ** 2
        return HPPoint((num * den.conjugate()).real / q, p.y / q)

    def apply_boundary(self, xi: HPBoundary) -> HPBoundary:
        return HPBoundary(self.a * xi.u + self.b * xi.v, self.c * xi.u + self.d * xi.v)

    def is_identity(self, tol: float = 1e-9) -> bool:
        """Identity of PSL(2,R): the matrix is ``+I`` or ``-I``."""
        return (abs(self.b) <= tol and abs(self.c) <= tol
                and abs(self.a - self.d) <= tol and abs(abs(self.a) - 1.0) <= tol)


def _distance(p: HPPoint, q: HPPoint) -> float:
    return 2.0 * math.asinh(abs(p.z - q.z) / (2.0 * math.sqrt(p.y * q.y)))


def _affine_frame(p: HPPoint) -> Mobius:
    """``z -> y z + x``; sends ``i`` to ``p`` and fixes infinity."""
    s = math.sqrt(p.y)
    return Mobius(s, p.x / s, 0.0, 1.0 / s)


def frame_at(p: HPPoint, alpha: HPBoundary) -> Mobius:
    """SL(2,R) element ``g`` with ``g(i) = p`` and ``g(inf) = alpha``."""
    g0 = _affine_frame(p)
    beta = g0.inverse().apply_boundary(alpha)
    # SO(2) fixes i and sends inf to u/v
    return g0 @ Mobius(beta.u, -beta.v, beta.v, beta.u)


def frame_from_ends(beta: HPBoundary, alpha: HPBoundary) -> Mobius:
    """SL(2,R) element ``g`` with ``g(0) = beta`` and ``g(inf) = alpha``."""
    D = alpha.u * beta.v - beta.u * alpha.v
    if abs(D) <= BOUNDARY_TOL:
        raise DegenerateInputError("geodesic endpoints coincide")
    return Mobius(alpha.u, beta.u / D, alpha.v, beta.v / D)


@dataclass(frozen=True)
class HPGeodesic:
    """Unit-speed geodesic ``t -> frame(i e^t)`` on ``[t_min, t_max]``."""

    frame: Mobius
    t_min: float = -math.inf
    t_max: float = math.inf

    def __call__(self, t: float) -> HPPoint:
        if t < self.t_min - 1e-12 or t > self.t_max + 1e-12:
            raise DomainError(f"parameter {t} outside [{self.t_min}, {self.t_max}]")
        return self.frame.apply(HPPoint(0.0, math.exp(t)))

    @property
    def forward_end(self) -> HPBoundary:
        return self.frame.apply_boundary(HPBoundary.infinity())

    @property
    def backward_end(self) -> HPBoundary:
        return self.frame.apply_boundary(HPBoundary(0.0, 1.0))

    @property
    def vertical(self) -> bool:
        return self.forward_end.v == 0 or self.backward_end.v == 0

    @property
    def center(self) -> float:
        """Centre of the supporting semicircle (``nan`` for vertical lines)."""
        if self.vertical:
            return math.nan
        return 0.5 * (self.forward_end.value + self.backward_end.value)

    @property
    def radius(self) -> float:
        if self.vertical:
            return math.inf
        return 0.5 * abs(self.forward_end.value - self.backward_end.value)

    def parameter(self, p: HPPoint) -> float:
        """Parameter of the foot of the perpendicular from ``p``."""
        return math.log(abs(self.frame.inverse().apply(p).z))

    def distance_to(self, p: HPPoint) -> float:
        """Distance from ``p`` to the traced set ``gamma([t_min, t_max])``."""
        w = self.frame.inverse().apply(p)
        t = math.log(abs(w.z))
        if self.t_min <= t <= self.t_max:
            return math.asinh(abs(w.x) / w.y)
        t = min(max(t, self.t_min), self.t_max)
        return _distance(p, self(t))

    def reanchor(self, t0: float) -> "HPGeodesic":
        """Same geodesic with parameter shifted: ``new(t) = old(t + t0)``."""
        s = math.exp(0.5 * t0)
        return HPGeodesic(self.frame @ Mobius(s, 0.0, 0.0, 1.0 / s),
                          self.t_min - t0, self.t_max - t0)


I = HPPoint(0.0, 1.0)


class HalfPlane:
    """Operations of the upper half-plane model; base point ``i`` by default."""

    name = "halfplane"
    exact = False
    point_type = HPPoint
    boundary_type = HPBoundary
    isometry_type = Mobius

    def base_point(self) -> HPPoint:
        return I

    def identity(self) -> Mobius:
        return Mobius.identity()

    # metric ---------------------------------------------------------------
    def distance(self, p: HPPoint, q: HPPoint) -> float:
        return _distance(p, q)

    def pairwise_distance(self, ps, qs) -> np.ndarray:
        """Matrix of distances between two point lists."""
        x1 = np.array([p.x for p in ps])[:, None]
        y1 = np.array([p.y for p in ps])[:, None]
        x2 = np.array([q.x for q in qs])[None, :]
        y2 = np.array([q.y for q in qs])[None, :]
        return 2.0 * np.arcsinh(np.hypot(x1 - x2, y1 - y2) / (2.0 * np.sqrt(y1 * y2)))

    # geodesics ------------------------------------------------------------
    def geodesic_between(self, a: HPPoint, b: HPPoint) -> HPGeodesic:
        d = _distance(a, b)
        if d == 0.0:
            raise DegenerateInputError("geodesic between a point and itself")
        g0 = _affine_frame(a)
        w = g0.inverse().apply(b)
        # endpoints of the circle through i and w: roots of x e^2 - k e - x = 0
        k = w.x * w.x + w.y * w.y - 1.0
        s = math.sqrt(k * k + 4.0 * w.x * w.x)
        q = k + math.copysign(s, k) if k != 0 else s
        for e in (HPBoundary(q, 2.0 * w.x), HPBoundary(-2.0 * w.x, q)):
            g = frame_at(a, g0.apply_boundary(e))
            if g.inverse().apply(b).y > 1.0:
                return HPGeodesic(g, 0.0, d)
        raise AssertionError("no endpoint orients the segment")  # pragma: no cover

    def ray_to_boundary(self, a: HPPoint, alpha: HPBoundary) -> HPGeodesic:
        return HPGeodesic(frame_at(a, alpha), 0.0, math.inf)

    def geodesic_between_boundary(self, beta: HPBoundary, alpha: HPBoundary,
                                  p: HPPoint = I) -> HPGeodesic:
        """Line from ``beta`` to ``alpha`` with ``gamma(0)`` the foot of ``p``."""
        g = frame_from_ends(beta, alpha)
        return HPGeodesic(g).reanchor(math.log(abs(g.inverse().apply(p).z)))

    def line_through(self, h: HPPoint, alpha: HPBoundary) -> HPGeodesic:
        """Complete geodesic with ``gamma(0) = h`` and ``gamma(+inf) = alpha``."""
        return HPGeodesic(frame_at(h, alpha))

    def backward_end(self, h: HPPoint, alpha: HPBoundary) -> HPBoundary:
        """``gamma(-inf)`` of the line through ``h`` towards ``alpha``."""
        return frame_at(h, alpha).apply_boundary(HPBoundary(0.0, 1.0))

    # Gromov products and Busemann functions --------------------------------
    def gromov_point_boundary(self, alpha: HPBoundary, x: HPPoint, h: HPPoint) -> float:
        """Closed form of ``(alpha, x)_h``: normalise ``h -> i``, ``alpha -> inf``."""
        w = frame_at(h, alpha).inverse().apply(x)
        return 0.5 * (_distance(x, h) + math.log(w.y))

    def busemann(self, p: HPPoint, alpha: HPBoundary, h: HPPoint) -> float:
        """``b_{p,alpha}(h) = 2 (alpha, p)_h - d(p, h)``."""
        return 2.0 * self.gromov_point_boundary(alpha, p, h) - _distance(p, h)

    def busemann_along(self, p: HPPoint, gamma: HPGeodesic, t: float) -> float:
        """``b_{p, gamma(+inf)}(gamma(t))`` evaluated in the frame of ``gamma``.

        Pulling back by the frame sends the forward end to infinity exactly,
        so the value ``log Im(g^{-1} p) - t`` stays accurate far along the line.
        """
        return math.log(gamma.frame.inverse().apply(p).y) - t

    def busemann_array(self, p: HPPoint, us, vs, hx, hy) -> np.ndarray:
        """Vectorised Busemann values through the Poisson kernel.

        ``P(xi, z) = Im z / |v z - u|^2`` and ``b_{p,xi}(h) = log P(xi,p)/P(xi,h)``;
        arguments broadcast against each other.
        """
        us, vs, hx, hy = (np.asarray(a, dtype=float) for a in (us, vs, hx, hy))
        kh = (vs * hx - us) ** 2 + (vs * hy) ** 2
        kp = (vs * p.x - us) ** 2 + (vs * p.y) ** 2
        return np.log(p.y) - np.log(hy) + np.log(kh) - np.log(kp)

    # boundary -------------------------------------------------------------
    def boundary_equal(self, xi: HPBoundary, eta: HPBoundary, tol: float = BOUNDARY_TOL) -> bool:
        return xi.chart_distance(eta) <= tol

    def boundary_distance(self, xi: HPBoundary, eta: HPBoundary) -> float:
        return xi.chart_distance(eta)

    # isometries -----------------------------------------------------------
    def apply(self, g: Mobius, p: HPPoint) -> HPPoint:
        return g.apply(p)

    def apply_boundary(self, g: Mobius, xi: HPBoundary) -> HPBoundary:
        return g.apply_boundary(xi)

    # sampling -------------------------------------------------------------
    def point_at(self, center: HPPoint, angle: float, r: float) -> HPPoint:
        return (_affine_frame(center) @ Mobius.rotation(angle)).apply(HPPoint(0.0, math.exp(r)))

    def random_point(self, rng: np.random.Generator, center: HPPoint = I, radius: float = 3.0) -> HPPoint:
        return self.point_at(center, rng.uniform(0, 2 * math.pi), rng.uniform(0, radius))

    def random_boundary(self, rng: np.random.Generator) -> HPBoundary:
        phi = rng.uniform(0, math.pi)
        return HPBoundary(math.cos(phi), math.sin(phi))

    def random_isometry(self, rng: np.random.Generator, scale: float = 1.0) -> Mobius:
        t = rng.uniform(0, scale)
        return (Mobius.rotation(rng.uniform(0, 2 * math.pi)) @ Mobius.diag(math.exp(t))
                @ Mobius.rotation(rng.uniform(0, 2 * math.pi)))

    def probe_set(self, p: HPPoint = I, radius: float = 3.0, count: int = 8) -> list[HPPoint]:
        """Fixed probe points in the closed ball of ``radius`` about ``p``."""
        return [self.point_at(p, 2 * math.pi * k / count + 0.3, radius * (k + 1) / count)
                for k in range(count)]

    def boundary_probes(self) -> list[HPBoundary]:
        return [HPBoundary.from_real(t) for t in (0.0, 1.0, -1.0, math.inf, 2.0, -0.5, 3.0, -3.0)]

    # json -----------------------------------------------------------------
    def point_to_json(self, p: HPPoint):
        return [p.x, p.y]

    def point_from_json(self, obj) -> HPPoint:
        return HPPoint(float(obj[0]), float(obj[1]))

    def boundary_to_json(self, xi: HPBoundary):
        return [xi.u, xi.v]

    def boundary_from_json(self, obj) -> HPBoundary:
        xi = HPBoundary.__new__(HPBoundary)
        # stored pairs are already normalised; bypass renormalisation for bit-exactness
        object.__setattr__(xi, "u", float(obj[0]))
        object.__setattr__(xi, "v", float(obj[1]))
        return xi

    def isometry_to_json(self, g: Mobius):
        return [g.a, g.b, g.c, g.d]

    def isometry_from_json(self, obj) -> Mobius:
        return Mobius(*(float(t) for t in obj))
