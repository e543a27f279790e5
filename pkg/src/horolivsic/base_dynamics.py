"""The two-sided full shift on ``m`` symbols.

Points of {0,...,m-1}^Z are represented lazily: a :class:`BasePoint` holds a
tail rule that can produce any symbol, plus an offset that records how many
times the point has been shifted.  Central words of length ``2r+1`` (indices
``-r..r``) are encoded as base-``m`` integers, most significant digit first;
every tabulated object in the package is indexed by these codes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, ResourceError

H_EQ = 64
ORBIT_CAP = 2**20


# --- word coding -----------------------------------------------------------

def word_length(depth: int) -> int:
    return 2 * depth + 1


def n_words(m: int, depth: int) -> int:
    return m ** (2 * depth + 1)


@lru_cache(maxsize=64)
def _all_words(m: int, length: int) -> np.ndarray:
    codes = np.arange(m**length, dtype=np.int64)[:, None]
    powers = m ** np.arange(length - 1, -1, -1, dtype=np.int64)
    out = (codes // powers) % m
    out.setflags(write=False)
    return out


def all_words(m: int, length: int) -> np.ndarray:
    """Array of shape ``(m**length, length)``; row ``c`` spells code ``c``."""
    return _all_words(m, length)


def encode(word, m: int) -> int:
    code = 0
    for s in word:
        code = code * m + int(s)
    return code


def decode(code: int, length: int, m: int) -> tuple[int, ...]:
    out = []
    for _ in range(length):
        code, s = divmod(code, m)
        out.append(s)
    return tuple(reversed(out))


def word_str(code: int, length: int, m: int) -> str:
    if m > 10:
        return ",".join(str(s) for s in decode(code, length, m))
    return "".join(str(s) for s in decode(code, length, m))


def parse_word(text: str, m: int) -> tuple[int, ...]:
    if "," in text:
        return tuple(int(s) for s in text.split(","))
    return tuple(int(s) for s in text)


def subcode(code, length: int, start: int, sublength: int, m: int):
    """Code of positions ``[start, start+sublength)`` of a word of ``length``.

    Works elementwise on integer arrays as well as on Python ints.
    """
    return (code // m ** (length - start - sublength)) % m**sublength


def central_code(code, depth: int, subdepth: int, m: int):
    """Restrict a depth-``depth`` central word to its depth-``subdepth`` core."""
    if subdepth > depth:
        raise DomainError(f"cannot restrict depth {depth} word to depth {subdepth}")
    return subcode(code, 2 * depth + 1, depth - subdepth, 2 * subdepth + 1, m)


def transition_codes(m: int, depth: int) -> tuple[np.ndarray, np.ndarray]:
    """All cylinder transitions ``w -> sigma w`` at ``depth``.

    A transition is a word of length ``2*depth+2`` covering indices
    ``-depth..depth+1``; the returned arrays hold the codes of the cylinder of
    the point and of its shift.
    """
    L = 2 * depth + 1
    ext = np.arange(m ** (L + 1), dtype=np.int64)
    return ext // m, ext % m**L


def sliding_codes(symbols: np.ndarray, length: int, m: int) -> np.ndarray:
    """Codes of every window of ``length`` consecutive symbols."""
    n = len(symbols) - length + 1
    if n <= 0:
        return np.zeros(0, dtype=np.int64)
    out = np.zeros(n, dtype=np.int64)
    for j in range(length):
        out = out * m + symbols[j : j + n]
    return out


# --- tail rules ------------------------------------------------------------

@dataclass(frozen=True)
class ZeroFill:
    """Symbols ``word`` at indices ``start, start+1, ...`` and 0 elsewhere."""

    start: int
    word: tuple[int, ...]

    def symbols(self, lo: int, hi: int) -> np.ndarray:
        out = np.zeros(hi - lo, dtype=np.int64)
        a = max(lo, self.start)
        b = min(hi, self.start + len(self.word))
        if a < b:
            out[a - lo : b - lo] = self.word[a - self.start : b - self.start]
        return out

    def alphabet_ok(self, m: int) -> bool:
        return all(0 <= s < m for s in self.word)


@dataclass(frozen=True)
class PeriodicFill:
    """``x_i = word[i mod n]``."""

    word: tuple[int, ...]

    def symbols(self, lo: int, hi: int) -> np.ndarray:
        w = np.asarray(self.word, dtype=np.int64)
        return w[np.arange(lo, hi) % len(w)]

    def alphabet_ok(self, m: int) -> bool:
        return len(self.word) > 0 and all(0 <= s < m for s in self.word)


@lru_cache(maxsize=16)
def _enumeration_block(m: int, max_len: int) -> np.ndarray:
    parts = [all_words(m, ell).ravel() for ell in range(1, max_len + 1)]
    out = np.concatenate(parts)
    out.setflags(write=False)
    return out


def _enumeration_prefix(m: int, n: int) -> np.ndarray:
    total, ell = 0, 0
    while total < n:
        ell += 1
        total += ell * m**ell
    return _enumeration_block(m, ell)


@dataclass(frozen=True)
class EnumerationFill:
    """All words of length 1, 2, 3, ... concatenated from index 0; zeros left."""

    m: int

    def symbols(self, lo: int, hi: int) -> np.ndarray:
        out = np.zeros(hi - lo, dtype=np.int64)
        if hi > 0:
            a = max(lo, 0)
            out[a - lo :] = _enumeration_prefix(self.m, hi)[a:hi]
        return out

    def alphabet_ok(self, m: int) -> bool:
        return self.m == m


# --- points ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BasePoint:
    """A point of the full shift: ``x_i = rule.symbol(i + offset)``.

    Equality is decided on the window ``|i| <= H_EQ``.
    """

    m: int
    rule: ZeroFill | PeriodicFill | EnumerationFill
    offset: int = 0

    def __post_init__(self):
        if self.m < 2:
            raise DomainError("alphabet size must be at least 2")
        if not self.rule.alphabet_ok(self.m):
            raise DomainError(f"tail rule {self.rule!r} uses symbols outside 0..{self.m - 1}")

    @classmethod
    def periodic(cls, word, m: int = 2, phase: int = 0) -> "BasePoint":
        word = tuple(int(s) for s in word)
        return cls(m, PeriodicFill(word), phase % len(word))

    @classmethod
    def constant(cls, symbol: int = 0, m: int = 2) -> "BasePoint":
        return cls.periodic((symbol,), m)

    @classmethod
    def from_window(cls, word, m: int = 2, start: int | None = None) -> "BasePoint":
        """Zero-filled point; by default ``word`` is centred on index 0."""
        word = tuple(int(s) for s in word)
        if start is None:
            start = -(len(word) // 2)
        return cls(m, ZeroFill(start, word))

    @classmethod
    def random(cls, rng: np.random.Generator, m: int = 2, radius: int = 24) -> "BasePoint":
        word = tuple(int(s) for s in rng.integers(0, m, size=2 * radius + 1))
        return cls(m, ZeroFill(-radius, word))

    def symbols(self, lo: int, hi: int) -> np.ndarray:
        """Symbols ``x_lo, ..., x_{hi-1}``."""
        return self.rule.symbols(lo + self.offset, hi + self.offset)

    def symbol(self, i: int) -> int:
        return int(self.symbols(i, i + 1)[0])

    def window(self, depth: int) -> tuple[int, ...]:
        return tuple(int(s) for s in self.symbols(-depth, depth + 1))

    def code(self, depth: int) -> int:
        return encode(self.symbols(-depth, depth + 1), self.m)

    def shift(self, k: int = 1) -> "BasePoint":
        offset = self.offset + k
        if isinstance(self.rule, PeriodicFill):
            offset %= len(self.rule.word)
        return BasePoint(self.m, self.rule, offset)

    def __eq__(self, other):
        if not isinstance(other, BasePoint):
            return NotImplemented
        return self.m == other.m and base_metric(self, other) == 0.0

    def __hash__(self):
        return hash((self.m, self.window(H_EQ)))

    def __repr__(self):
        w = "".join(str(s) for s in self.window(4))
        return f"BasePoint(m={self.m}, ...{w}..., rule={type(self.rule).__name__})"


def shift_step(x: BasePoint) -> BasePoint:
    return x.shift(1)


def base_metric(x: BasePoint, y: BasePoint, horizon: int = H_EQ) -> float:
    """``2**-k`` with ``k`` the largest n such that ``x_i == y_i`` for ``|i| < n``.

    Points agreeing on ``|i| <= horizon`` are declared equal (distance 0).
    """
    if x.m != y.m:
        raise DomainError("points live on shifts with different alphabets")
    a = x.symbols(-horizon, horizon + 1)
    b = y.symbols(-horizon, horizon + 1)
    diff = np.nonzero(a != b)[0]
    if diff.size == 0:
        return 0.0
    k = int(np.min(np.abs(diff - horizon)))
    return 2.0**-k


@dataclass(frozen=True)
class ClosingCertificate:
    """Constants of the exponential closing property (full shift defaults)."""

    c: float = 1.0
    lam: float = math.log(2.0)
    delta0: float = 1.0


FULL_SHIFT_CLOSING = ClosingCertificate()


def exponentially_close(x: BasePoint, y: BasePoint, k: int, delta: float,
                        lam: float = FULL_SHIFT_CLOSING.lam) -> bool:
    """Whether the orbit segments of ``x`` and ``y`` up to time ``k`` are
    exponentially ``delta``-close with exponent ``lam``."""
    for j in range(k + 1):
        bound = delta * math.exp(-lam * min(j, k - j))
        if base_metric(x.shift(j), y.shift(j)) > bound * (1 + 1e-12):
            return False
    return True


def transitive_point(depth: int, m: int = 2) -> tuple[BasePoint, int]:
    """Point with forward orbit hitting every depth-``depth`` cylinder.

    Returns the point and the horizon ``N``: every central word of length
    ``2*depth+1`` shows up as the window of ``sigma^n x`` for some ``n <= N``.
    """
    if depth < 0:
        raise DomainError("depth must be nonnegative")
    L = 2 * depth + 1
    x = BasePoint(m, EnumerationFill(m))
    preceding = sum(ell * m**ell for ell in range(1, L))
    bound = preceding + (m**L - 1) * L + depth
    codes = sliding_codes(x.symbols(-depth, bound + depth + 1), L, m)
    _, first = np.unique(codes, return_index=True)
    if len(first) != m**L:
        raise AssertionError("enumeration point failed to cover all cylinders")
    return x, int(first.max())


# --- periodic orbits -------------------------------------------------------

@dataclass(frozen=True)
class PeriodicOrbit:
    """Orbit of the periodic point spelling ``word`` from index 0."""

    word: tuple[int, ...]
    m: int = 2

    @property
    def period(self) -> int:
        return len(self.word)

    def point(self, phase: int = 0) -> BasePoint:
        return BasePoint.periodic(self.word, self.m, phase)

    def window_codes(self, depth: int) -> list[int]:
        """Depth-``depth`` cylinder codes of ``sigma^j p`` for ``j < period``."""
        w = np.asarray(self.word, dtype=np.int64)
        n = len(w)
        idx = (np.arange(n)[:, None] + np.arange(-depth, depth + 1)[None, :]) % n
        powers = self.m ** np.arange(2 * depth, -1, -1, dtype=np.int64)
        return [int(c) for c in (w[idx] * powers).sum(axis=1)]

    def label(self) -> str:
        return "".join(str(s) for s in self.word) if self.m <= 10 else ",".join(map(str, self.word))


def primitive_necklaces(m: int, n: int) -> np.ndarray:
    """Codes of the least rotations of the primitive words of length ``n``."""
    codes = np.arange(m**n, dtype=np.int64)
    keep = np.ones(m**n, dtype=bool)
    for k in range(1, n):
        rot = (codes * m**k) % m**n + codes // m ** (n - k)
        keep &= rot > codes
    return codes[keep]


def enumerate_periodic_orbits(max_period: int, m: int = 2, cap: int = ORBIT_CAP) -> list[PeriodicOrbit]:
    """One representative per periodic orbit of exact period ``<= max_period``."""
    if m**max_period > cap:
        raise ResourceError(f"{m}**{max_period} words exceed the orbit cap {cap}")
    out = []
    for n in range(1, max_period + 1):
        for c in primitive_necklaces(m, n):
            out.append(PeriodicOrbit(decode(int(c), n, m), m))
    return out


def closing_point(x: BasePoint, k: int, cert: ClosingCertificate = FULL_SHIFT_CLOSING) -> PeriodicOrbit:
    """Period-``k`` point shadowing the almost-closed orbit segment of ``x``.

    The closing point repeats ``x_0 ... x_{k-1}``; for the full shift it
    satisfies the closing bound with ``delta = c * d(x, sigma^k x)``.
    """
    if k < 1:
        raise DomainError("closing time must be positive")
    gap = base_metric(x, x.shift(k))
    if not gap < cert.delta0:
        raise DomainError(f"d(x, T^{k} x) = {gap} is not below delta0 = {cert.delta0}")
    return PeriodicOrbit(tuple(int(s) for s in x.symbols(0, k)), x.m)
