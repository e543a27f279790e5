"""The 3-regular tree as the Cayley graph of Z/2 * Z/2 * Z/2.

Vertices are reduced (non-backtracking) words over {0, 1, 2}; the root is
the empty word and ``w`` is adjacent to ``w s``.  Ends are eventually periodic
reduced infinite words ``head + period + period + ...``.  Isometries are pairs
``(word, perm)`` acting by ``v -> word * perm(v)``: a letter relabelling
followed by left multiplication.  Every quantity here is an exact integer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateInputError, DomainError

Word = tuple[int, ...]
LETTERS = (0, 1, 2)
ID_PERM = (0, 1, 2)


def reduce_word(word) -> Word:
    out: list[int] = []
    for s in word:
        if out and out[-1] == s:
            out.pop()
        else:
            out.append(int(s))
    return tuple(out)


def is_reduced(word) -> bool:
    return all(s in LETTERS for s in word) and all(a != b for a, b in zip(word, word[1:]))


def invert(word: Word) -> Word:
    return tuple(reversed(word))


def permute(perm, word) -> Word:
    return tuple(perm[s] for s in word)


def common_prefix(a, b) -> int:
    n = 0
    for s, t in zip(a, b):
        if s != t:
            break
        n += 1
    return n


@dataclass(frozen=True)
class TreeVertex:
    word: Word = ()

    def __post_init__(self):
        w = tuple(int(s) for s in self.word)
        if not is_reduced(w):
            raise DomainError(f"{w} is not a reduced word over {{0,1,2}}")
        object.__setattr__(self, "word", w)

    @property
    def depth(self) -> int:
        return len(self.word)


ROOT = TreeVertex(())


@dataclass(frozen=True)
class TreeEnd:
    """The end ``head period period ...``, kept in canonical form."""

    head: Word
    period: Word

    def __post_init__(self):
        head = tuple(int(s) for s in self.head)
        period = tuple(int(s) for s in self.period)
        n = len(period)
        if n < 2 or any(period[i] == period[(i + 1) % n] for i in range(n)):
            raise DomainError(f"period {period} does not repeat without backtracking")
        if not is_reduced(head) or not set(period) <= set(LETTERS):
            raise DomainError(f"head {head} is not reduced")
        if head and head[-1] == period[0]:
            raise DomainError("head and period backtrack at the junction")
        for q in range(1, n + 1):
            if n % q == 0 and period == period[:q] * (n // q):
                period = period[:q]
                break
        while head and head[-1] == period[-1]:
            head = head[:-1]
            period = period[-1:] + period[:-1]
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "period", period)

    def letters(self, n: int) -> Word:
        out = list(self.head[:n])
        k = 0
        while len(out) < n:
            out.append(self.period[k % len(self.period)])
            k += 1
        return tuple(out)

    def drop(self, k: int) -> "TreeEnd":
        """The end read from letter ``k`` on."""
        if k <= len(self.head):
            return TreeEnd(self.head[k:], self.period)
        r = (k - len(self.head)) % len(self.period)
        return TreeEnd((), self.period[r:] + self.period[:r])

    def prepend(self, word: Word) -> "TreeEnd":
        return TreeEnd(tuple(word) + self.head, self.period)

    def differ_horizon(self, other: "TreeEnd") -> int:
        """Index by which two distinct ends must have disagreed."""
        return max(len(self.head), len(other.head)) + len(self.period) * len(other.period) + 1


def end_prefix(xi: TreeEnd, eta: TreeEnd) -> float:
    """Length of the common prefix of two ends (``inf`` when equal)."""
    if xi == eta:
        return math.inf
    n = xi.differ_horizon(eta)
    return float(common_prefix(xi.letters(n), eta.letters(n)))


@dataclass(frozen=True)
class TreeIsometry:
    """``v -> reduce(word + perm(v))``."""

    word: Word = ()
    perm: tuple[int, int, int] = ID_PERM

    def __post_init__(self):
        w = tuple(int(s) for s in self.word)
        perm = tuple(int(s) for s in self.perm)
        if not is_reduced(w):
            raise DomainError(f"translation word {w} is not reduced")
        if sorted(perm) != list(LETTERS):
            raise DomainError(f"{perm} is not a permutation of (0, 1, 2)")
        object.__setattr__(self, "word", w)
        object.__setattr__(self, "perm", perm)

    def __matmul__(self, other: "TreeIsometry") -> "TreeIsometry":
        word = reduce_word(self.word + permute(self.perm, other.word))
        return TreeIsometry(word, tuple(self.perm[s] for s in other.perm))

    def inverse(self) -> "TreeIsometry":
        pinv = [0, 0, 0]
        for i, s in enumerate(self.perm):
            pinv[s] = i
        return TreeIsometry(permute(pinv, invert(self.word)), tuple(pinv))

    def apply(self, v: TreeVertex) -> TreeVertex:
        return TreeVertex(reduce_word(self.word + permute(self.perm, v.word)))

    def apply_word(self, w: Word) -> Word:
        return reduce_word(self.word + permute(self.perm, w))

    def apply_boundary(self, xi: TreeEnd) -> TreeEnd:
        head = permute(self.perm, xi.head)
        period = permute(self.perm, xi.period)
        reps = len(self.word) // len(period) + 1
        reduced = reduce_word(self.word + head + period * reps)
        # the cancellation never reaches past the unrolled periods
        return TreeEnd(reduced, period)

    def is_identity(self, tol: float = 0.0) -> bool:
        return self.word == () and self.perm == ID_PERM


def _translate_to(p: TreeVertex) -> TreeIsometry:
    """Isometry sending the root to ``p``."""
    return TreeIsometry(p.word)


def _relative(p: TreeVertex, w: Word) -> Word:
    return reduce_word(invert(p.word) + w)


@dataclass(frozen=True)
class TreeGeodesic:
    """Integer-parametrised geodesic through ``origin``.

    ``forward`` and ``backward`` are directions relative to ``origin``: a
    finite reduced word (a segment endpoint), a :class:`TreeEnd`, or ``()``
    for a ray.  ``gamma(t) = origin * forward[:t]`` for ``t >= 0`` and
    ``origin * backward[:-t]`` for ``t < 0``.
    """

    origin: Word
    forward: Word | TreeEnd
    backward: Word | TreeEnd = ()

    def __post_init__(self):
        f = self.forward.letters(1) if isinstance(self.forward, TreeEnd) else self.forward[:1]
        b = self.backward.letters(1) if isinstance(self.backward, TreeEnd) else self.backward[:1]
        if f and b and f == b:
            raise DomainError("forward and backward directions backtrack")

    @property
    def t_max(self) -> float:
        return math.inf if isinstance(self.forward, TreeEnd) else float(len(self.forward))

    @property
    def t_min(self) -> float:
        return -math.inf if isinstance(self.backward, TreeEnd) else -float(len(self.backward))

    def __call__(self, t) -> TreeVertex:
        k = round(t)
        if abs(t - k) > 1e-9:
            raise DomainError(f"tree geodesics are sampled at integer times, got {t}")
        if k < self.t_min or k > self.t_max:
            raise DomainError(f"parameter {k} outside [{self.t_min}, {self.t_max}]")
        d = self.forward if k >= 0 else self.backward
        letters = d.letters(abs(k)) if isinstance(d, TreeEnd) else d[: abs(k)]
        return TreeVertex(reduce_word(self.origin + letters))

    @property
    def forward_end(self) -> TreeEnd:
        if not isinstance(self.forward, TreeEnd):
            raise DomainError("segment has no forward end")
        return TreeIsometry(self.origin).apply_boundary(self.forward)

    @property
    def backward_end(self) -> TreeEnd:
        if not isinstance(self.backward, TreeEnd):
            raise DomainError("geodesic has no backward end")
        return TreeIsometry(self.origin).apply_boundary(self.backward)

    def _take(self, d, n):
        return d.letters(n) if isinstance(d, TreeEnd) else tuple(d[:n])

    def _rest(self, d, n):
        return d.drop(n) if isinstance(d, TreeEnd) else tuple(d[n:])

    def _prefix(self, word, d):
        return d.prepend(word) if isinstance(d, TreeEnd) else tuple(word) + tuple(d)

    def reanchor(self, t0) -> "TreeGeodesic":
        k = round(t0)
        if abs(t0 - k) > 1e-9:
            raise DomainError("tree geodesics re-anchor at integer times")
        if k >= 0:
            step = self._take(self.forward, k)
            return TreeGeodesic(reduce_word(self.origin + step), self._rest(self.forward, k),
                                self._prefix(invert(step), self.backward))
        step = self._take(self.backward, -k)
        return TreeGeodesic(reduce_word(self.origin + step),
                            self._prefix(invert(step), self.forward), self._rest(self.backward, -k))

    def parameter(self, v: TreeVertex) -> float:
        """Parameter of the vertex of the geodesic closest to ``v``."""
        rel = _relative(TreeVertex(self.origin), v.word)
        f = self._take(self.forward, len(rel))
        b = self._take(self.backward, len(rel))
        kf, kb = common_prefix(rel, f), common_prefix(rel, b)
        return float(kf) if kf >= kb else -float(kb)

    def distance_to(self, v: TreeVertex) -> float:
        t = self.parameter(v)
        return float(len(_relative(self(t), v.word)))


class Tree:
    """Operations of the 3-regular tree model; base point the root."""

    name = "tree"
    exact = True
    point_type = TreeVertex
    boundary_type = TreeEnd
    isometry_type = TreeIsometry

    def base_point(self) -> TreeVertex:
        return ROOT

    def identity(self) -> TreeIsometry:
        return TreeIsometry()

    def distance(self, p: TreeVertex, q: TreeVertex) -> int:
        return len(_relative(p, q.word))

    def pairwise_distance(self, ps, qs) -> np.ndarray:
        return np.array([[self.distance(p, q) for q in qs] for p in ps], dtype=float)

    def geodesic_between(self, a: TreeVertex, b: TreeVertex) -> TreeGeodesic:
        rel = _relative(a, b.word)
        if not rel:
            raise DegenerateInputError("geodesic between a vertex and itself")
        return TreeGeodesic(a.word, rel, ())

    def relative_end(self, p: TreeVertex, alpha: TreeEnd) -> TreeEnd:
        """``alpha`` as seen from ``p`` (``p^{-1} alpha``)."""
        return TreeIsometry(invert(p.word)).apply_boundary(alpha)

    def ray_to_boundary(self, a: TreeVertex, alpha: TreeEnd) -> TreeGeodesic:
        return TreeGeodesic(a.word, self.relative_end(a, alpha), ())

    def geodesic_between_boundary(self, beta: TreeEnd, alpha: TreeEnd,
                                  p: TreeVertex = ROOT) -> TreeGeodesic:
        """Line from ``beta`` to ``alpha``; ``gamma(0)`` is the vertex nearest ``p``."""
        if beta == alpha:
            raise DegenerateInputError("geodesic endpoints coincide")
        a, b = self.relative_end(p, alpha), self.relative_end(p, beta)
        k = int(end_prefix(a, b))
        return TreeGeodesic(reduce_word(p.word + a.letters(k)), a.drop(k), b.drop(k))

    def backward_end(self, h: TreeVertex, alpha: TreeEnd) -> TreeEnd:
        """A backward end for the line through ``h`` towards ``alpha``.

        Lines through a vertex branch in a tree; we continue away from
        ``alpha`` with the smallest admissible letters, alternating two of them.
        """
        first = self.relative_end(h, alpha).letters(1)[0]
        c0 = min(s for s in LETTERS if s != first)
        c1 = min(s for s in LETTERS if s != c0)
        return TreeIsometry(h.word).apply_boundary(TreeEnd((), (c0, c1)))

    def line_through(self, h: TreeVertex, alpha: TreeEnd) -> TreeGeodesic:
        rel = self.relative_end(h, alpha)
        back = self.relative_end(h, self.backward_end(h, alpha))
        return TreeGeodesic(h.word, rel, back)

    def gromov_product(self, x: TreeVertex, y: TreeVertex, p: TreeVertex) -> int:
        return common_prefix(_relative(p, x.word), _relative(p, y.word))

    def gromov_point_boundary(self, alpha: TreeEnd, x: TreeVertex, h: TreeVertex) -> int:
        rel = _relative(h, x.word)
        return common_prefix(self.relative_end(h, alpha).letters(len(rel)), rel)

    def gromov_boundary_boundary(self, xi: TreeEnd, eta: TreeEnd, p: TreeVertex) -> float:
        return end_prefix(self.relative_end(p, xi), self.relative_end(p, eta))

    def busemann(self, p: TreeVertex, alpha: TreeEnd, h: TreeVertex) -> int:
        return 2 * self.gromov_point_boundary(alpha, p, h) - self.distance(p, h)

    def busemann_along(self, p: TreeVertex, gamma: TreeGeodesic, t) -> int:
        """``b_{p, gamma(+inf)}(gamma(t))``."""
        return self.busemann(p, gamma.forward_end, gamma(t))

    def boundary_equal(self, xi: TreeEnd, eta: TreeEnd, tol: float = 0.0) -> bool:
        return xi == eta

    def boundary_distance(self, xi: TreeEnd, eta: TreeEnd) -> float:
        """Visual metric ``exp(-(xi, eta)_root)``."""
        return math.exp(-end_prefix(xi, eta))

    def apply(self, g: TreeIsometry, p: TreeVertex) -> TreeVertex:
        return g.apply(p)

    def apply_boundary(self, g: TreeIsometry, xi: TreeEnd) -> TreeEnd:
        return g.apply_boundary(xi)

    # sampling -------------------------------------------------------------
    @staticmethod
    def random_word(rng: np.random.Generator, length: int, avoid: int | None = None) -> Word:
        out: list[int] = []
        prev = avoid
        for _ in range(length):
            choices = [s for s in LETTERS if s != prev]
            prev = choices[int(rng.integers(len(choices)))]
            out.append(prev)
        return tuple(out)

    def random_point(self, rng: np.random.Generator, center: TreeVertex = ROOT, radius: int = 4) -> TreeVertex:
        w = self.random_word(rng, int(rng.integers(0, int(radius) + 1)))
        return TreeVertex(reduce_word(center.word + w))

    def random_boundary(self, rng: np.random.Generator, max_head: int = 8) -> TreeEnd:
        head = self.random_word(rng, int(rng.integers(0, max_head + 1)))
        while True:
            n = int(rng.integers(2, 5))
            period = self.random_word(rng, n, head[-1] if head else None)
            if period[-1] != period[0]:
                return TreeEnd(head, period)

    def random_isometry(self, rng: np.random.Generator, scale: float = 1.0) -> TreeIsometry:
        n = int(rng.integers(0, max(1, round(3 * scale)) + 1))
        perm = tuple(int(s) for s in rng.permutation(3))
        return TreeIsometry(self.random_word(rng, n), perm)

    def probe_set(self, p: TreeVertex = ROOT, radius: int = 3, count: int = 8) -> list[TreeVertex]:
        words = [(), (0,), (1,), (2,), (0, 1), (1, 2), (2, 0, 1), (0, 1, 2)]
        words = [w for w in words if len(w) <= radius][:count]
        return [TreeVertex(reduce_word(p.word + w)) for w in words]

    def boundary_probes(self) -> list[TreeEnd]:
        return [TreeEnd((), (0, 1)), TreeEnd((), (1, 2)), TreeEnd((), (2, 0)),
                TreeEnd((0,), (1, 2)), TreeEnd((1, 0), (2, 1)), TreeEnd((), (0, 1, 2))]

    # json -----------------------------------------------------------------
    @staticmethod
    def _w(word) -> str:
        return "".join(str(s) for s in word)

    @staticmethod
    def _unw(text: str) -> Word:
        return tuple(int(s) for s in text)

    def point_to_json(self, p: TreeVertex):
        return self._w(p.word)

    def point_from_json(self, obj) -> TreeVertex:
        return TreeVertex(self._unw(obj))

    def boundary_to_json(self, xi: TreeEnd):
        return {"head": self._w(xi.head), "period": self._w(xi.period)}

    def boundary_from_json(self, obj) -> TreeEnd:
        return TreeEnd(self._unw(obj["head"]), self._unw(obj["period"]))

    def isometry_to_json(self, g: TreeIsometry):
        return {"word": self._w(g.word), "perm": list(g.perm)}

    def isometry_from_json(self, obj) -> TreeIsometry:
        return TreeIsometry(self._unw(obj["word"]), tuple(obj["perm"]))
