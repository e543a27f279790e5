"""Real cohomological equation ``u(T omega) - u(omega) = psi(omega)`` over the shift.

The solver walks the forward orbit of a transitive point, sets ``u`` along
it by Birkhoff sums, and tabulates ``u`` on depth-``d`` cylinders from the
first visit of each cylinder.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base_dynamics import (ORBIT_CAP, BasePoint, central_code, decode, n_words,
                            primitive_necklaces, sliding_codes, transition_codes,
                            transitive_point, word_str)
from .cocycles import default_max_period, scalar_holder_sup
from .errors import CoverageError, DomainError, ObstructionError, ResourceError

EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class RealTable:
    """Real values over central words of ``depth`` (a locally constant function)."""

    m: int
    depth: int
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (n_words(self.m, self.depth),):
            raise DomainError(f"expected {n_words(self.m, self.depth)} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DomainError("table values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, c: float, m: int = 2, depth: int = 0) -> "RealTable":
        return cls(m, depth, np.full(n_words(m, depth), float(c)))

    @classmethod
    def from_function(cls, fn, m: int, depth: int) -> "RealTable":
        L = 2 * depth + 1
        return cls(m, depth, np.array([fn(decode(c, L, m)) for c in range(n_words(m, depth))]))

    def __call__(self, omega: BasePoint) -> float:
        return float(self.values[omega.code(self.depth)])

    def value(self, code: int) -> float:
        return float(self.values[int(code)])

    def lift(self, depth: int) -> "RealTable":
        if depth == self.depth:
            return self
        codes = central_code(np.arange(n_words(self.m, depth)), depth, self.depth, self.m)
        return RealTable(self.m, depth, self.values[codes])

    def with_value(self, code: int, value: float) -> "RealTable":
        v = self.values.copy()
        v[int(code)] = value
        return RealTable(self.m, self.depth, v)

    def __add__(self, c: float) -> "RealTable":
        return RealTable(self.m, self.depth, self.values + c)


RealCocycle = RealTable
RealSection = RealTable


def coboundary_of(g: RealTable) -> RealTable:
    """``psi = g o T - g`` as a table of depth ``g.depth + 1``."""
    r, m = g.depth, g.m
    codes = np.arange(m ** (2 * r + 3), dtype=np.int64)
    shifted = codes % m ** (2 * r + 1)
    centre = (codes // m) % m ** (2 * r + 1)
    return RealTable(m, r + 1, g.values[shifted] - g.values[centre])


def random_dyadic_table(rng: np.random.Generator, m: int = 2, depth: int = 2, bits: int = 32) -> RealTable:
    """Values ``k / 2^bits`` in ``[-1, 1]``.

    Sums of a few such values are exact in double precision, which keeps
    ground-truth comparisons free of rounding.
    """
    k = rng.integers(-(2**bits), 2**bits, size=n_words(m, depth), endpoint=True)
    return RealTable(m, depth, k.astype(float) / 2.0**bits)


def random_telescoped(seed: int, m: int = 2, depth: int = 2) -> tuple[RealTable, RealTable]:
    """``(psi, g)`` with ``psi = g o T - g`` and ``g`` a random dyadic table."""
    g = random_dyadic_table(np.random.default_rng(seed), m, depth)
    return coboundary_of(g), g


# --- periodic orbit sums ---------------------------------------------------------

@dataclass(frozen=True)
class RealPPOReport:
    labels: tuple
    periods: np.ndarray
    sums: np.ndarray
    tol: float
    max_period: int

    @property
    def max_abs_sum(self) -> float:
        return float(np.max(np.abs(self.sums))) if len(self.sums) else 0.0

    @property
    def passed(self) -> bool:
        return self.max_abs_sum <= self.tol

    def worst(self) -> tuple[str, int, float]:
        k = int(np.argmax(np.abs(self.sums)))
        return self.labels[k], int(self.periods[k]), float(self.sums[k])

    def failures(self) -> list[tuple[str, int, float]]:
        idx = np.nonzero(np.abs(self.sums) > self.tol)[0]
        return [(self.labels[k], int(self.periods[k]), float(self.sums[k])) for k in idx]


def orbit_sums(psi: RealTable, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Necklace codes of exact period ``n`` and the sums of ``psi`` around them."""
    m, r = psi.m, psi.depth
    necks = primitive_necklaces(m, n)
    if len(necks) == 0:
        return necks, np.zeros(0)
    powers = m ** np.arange(n - 1, -1, -1, dtype=np.int64)
    words = (necks[:, None] // powers[None, :]) % m
    idx = (np.arange(n)[:, None] + np.arange(-r, r + 1)[None, :]) % n
    wpow = m ** np.arange(2 * r, -1, -1, dtype=np.int64)
    codes = (words[:, idx] * wpow).sum(axis=2)
    return necks, psi.values[codes].sum(axis=1)


def ppo_real_check(psi: RealTable, max_period: int | None = None, tol: float = 1e-9,
                   cap: int = ORBIT_CAP) -> RealPPOReport:
    """Sums of ``psi`` around every periodic orbit of period ``<= max_period``."""
    max_period = default_max_period(psi.depth) if max_period is None else max_period
    if psi.m**max_period > cap:
        raise ResourceError(f"{psi.m}**{max_period} words exceed the orbit cap {cap}")
    labels, periods, sums = [], [], []
    for n in range(1, max_period + 1):
        necks, s = orbit_sums(psi, n)
        labels.extend(word_str(int(c), n, psi.m) for c in necks)
        periods.append(np.full(len(necks), n))
        sums.append(s)
    return RealPPOReport(tuple(labels), np.concatenate(periods), np.concatenate(sums), tol, max_period)


def brute_force_orbit_sum(psi: RealTable, word) -> float:
    """Direct evaluation around a repeating word (test oracle)."""
    n, r = len(word), psi.depth
    total = 0.0
    for j in range(n):
        w = [word[(j + i) % n] for i in range(-r, r + 1)]
        code = 0
        for s in w:
            code = code * psi.m + int(s)
        total += psi.values[code]
    return total


# --- residuals -------------------------------------------------------------------

@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    worst_transition: str
    transitions: int
    tol: float
    residuals: np.ndarray = field(repr=False, compare=False)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def rows(self, m: int, depth: int, limit: int | None = None):
        """``(transition word, residual)`` rows sorted by decreasing residual."""
        order = np.argsort(-self.residuals, kind="stable")
        if limit is not None:
            order = order[:limit]
        L = 2 * depth + 2
        return [(word_str(int(c), L, m), float(self.residuals[c])) for c in order]


def verify_solution(u: RealTable, psi: RealTable, tol: float = 1e-9) -> ResidualReport:
    """``sup |u(T w) - u(w) - psi(w)|`` over every transition between depth-``d`` cylinders."""
    if u.m != psi.m:
        raise DomainError("tables use different alphabets")
    if psi.depth > u.depth:
        raise DomainError(f"psi depth {psi.depth} exceeds solution depth {u.depth}")
    left, right = transition_codes(u.m, u.depth)
    psi_codes = central_code(left, u.depth, psi.depth, u.m)
    res = np.abs(u.values[right] - u.values[left] - psi.values[psi_codes])
    k = int(np.argmax(res))
    return ResidualReport(float(res[k]), word_str(k, 2 * u.depth + 2, u.m), len(res), tol, res)


# --- solver ----------------------------------------------------------------------

@dataclass(frozen=True)
class RealSolution:
    u: RealTable
    u0: float
    omega0: BasePoint
    orbit_budget: int
    holder_constant: float
    tau: float
    tabulation_bound: float
    roundoff_bound: float
    residual: ResidualReport
    ppo_max_abs_sum: float

    @property
    def depth(self) -> int:
        return self.u.depth

    @property
    def error_bound(self) -> float:
        return self.tabulation_bound + self.roundoff_bound

    def summary(self) -> dict:
        return {
            "depth": self.depth,
            "u0": self.u0,
            "orbit_budget": self.orbit_budget,
            "holder_constant": self.holder_constant,
            "tau": self.tau,
            "tabulation_bound": self.tabulation_bound,
            "roundoff_bound": self.roundoff_bound,
            "max_residual": self.residual.max_residual,
            "worst_transition": self.residual.worst_transition,
            "ppo_max_abs_sum": self.ppo_max_abs_sum,
        }


def solve_livsic(psi: RealTable, omega0: BasePoint | None = None, u0: float = 0.0,
                 depth: int | None = None, orbit_budget: int | None = None, tau: float = 1.0,
                 ppo_tol: float = 1e-8, max_period: int | None = None,
                 residual_tol: float = 1e-8) -> RealSolution:
    """Tabulate a solution of ``u o T - u = psi`` on depth-``depth`` cylinders.

    ``u(T^n omega0) = u0 + psi(omega0) + ... + psi(T^{n-1} omega0)``; each
    cylinder takes the value at the first time the orbit enters it.  By
    default ``omega0`` is the transitive point of the requested depth and
    the budget is its covering horizon.
    """
    depth = psi.depth if depth is None else depth
    if depth < psi.depth:
        raise DomainError(f"tabulation depth {depth} is below the depth {psi.depth} of psi")
    m = psi.m
    ppo = ppo_real_check(psi, max_period, ppo_tol)
    if not ppo.passed:
        label, period, value = ppo.worst()
        raise ObstructionError(f"orbit sum {value:.3e} at periodic word {label} (period {period})",
                               orbit=label, value=value)
    if omega0 is None:
        omega0, horizon = transitive_point(depth, m)
        orbit_budget = horizon if orbit_budget is None else orbit_budget
    if orbit_budget is None:
        raise DomainError("an orbit budget is required for a user-supplied starting point")
    if omega0.m != m:
        raise DomainError("starting point and psi use different alphabets")
    N = int(orbit_budget)
    r = psi.depth
    sym = omega0.symbols(-depth, N + depth + 1)
    cyl = sliding_codes(sym, 2 * depth + 1, m)                  # times 0..N
    steps = sliding_codes(sym[depth - r: depth - r + N + 2 * r], 2 * r + 1, m)  # times 0..N-1
    sums = np.empty(N + 1, dtype=np.longdouble)
    sums[0] = 0.0
    np.cumsum(psi.values[steps].astype(np.longdouble), out=sums[1:])
    U = (np.longdouble(u0) + sums).astype(float)
    hit_codes, first = np.unique(cyl, return_index=True)
    total = n_words(m, depth)
    if len(hit_codes) < total:
        missing = np.setdiff1d(np.arange(total), hit_codes)
        words = [word_str(int(c), 2 * depth + 1, m) for c in missing[:20]]
        raise CoverageError(f"{len(missing)} of {total} depth-{depth} cylinders not visited within "
                            f"{N} steps (first: {', '.join(words)})", missing=words)
    u = RealTable(m, depth, U[first])
    C = scalar_holder_sup(u.values, m, depth, tau)
    tab = C * 2.0 ** (-(depth + 1) * tau)
    # each step adds one rounding of a long double accumulator plus the final cast
    scale = float(np.max(np.abs(U))) + abs(u0) + 1.0
    roundoff = float((N * float(np.finfo(np.longdouble).eps) + EPS) * scale)
    residual = verify_solution(u, psi, residual_tol)
    return RealSolution(u, float(u0), omega0, N, C, tau, tab, roundoff, residual, ppo.max_abs_sum)


def gap_to_ground_truth(sol: RealSolution, g: RealTable) -> float:
    """``sup_w |u(w) - g(w) - c|`` with the gauge ``c = u0 - g(omega0)``."""
    d = max(sol.depth, g.depth)
    u = sol.u.lift(d)
    gl = g.lift(d)
    c = sol.u0 - g(sol.omega0)
    return float(np.max(np.abs(u.values - gl.values - c)))


def constant_offset_gap(u1: RealTable, u2: RealTable, offset: float) -> float:
    """``sup |u2 - u1 - offset|`` on a common depth."""
    d = max(u1.depth, u2.depth)
    return float(np.max(np.abs(u2.lift(d).values - u1.lift(d).values - offset)))


__all__ = [
    "RealTable", "RealCocycle", "RealSection", "RealPPOReport", "ResidualReport",
    "RealSolution", "coboundary_of", "random_dyadic_table", "random_telescoped",
    "orbit_sums", "ppo_real_check", "brute_force_orbit_sum", "verify_solution",
    "solve_livsic", "gap_to_ground_truth", "constant_offset_gap",
]
