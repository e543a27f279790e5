import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from horolivsic.base_dynamics import (
    BasePoint, EnumerationFill, FULL_SHIFT_CLOSING, PeriodicOrbit, base_metric, closing_point,
    decode, encode, enumerate_periodic_orbits, exponentially_close, transitive_point, shift_step,
    sliding_codes, subcode, central_code, transition_codes, word_length, n_words,
)
from horolivsic.errors import DomainError, ResourceError


def windows(m=2, radius=6):
    return st.lists(st.integers(0, m - 1), min_size=2 * radius + 1, max_size=2 * radius + 1)


def point(word, m=2):
    return BasePoint.from_window(word, m)


# --- word coding --------------------------------------------------------------------

@given(st.integers(2, 4).flatmap(lambda m: st.tuples(st.just(m), st.lists(st.integers(0, m - 1), min_size=1, max_size=9))))
def test_encode_decode_roundtrip(mw):
    m, w = mw
    assert decode(encode(w, m), len(w), m) == tuple(w)


def test_subcode_matches_slicing():
    m, L = 3, 7
    for code in range(0, m**L, 37):
        w = decode(code, L, m)
        for start in range(L):
            for n in range(1, L - start + 1):
                assert subcode(code, L, start, n, m) == encode(w[start:start + n], m)


def test_central_code_and_transitions():
    m, d = 2, 2
    for code in range(n_words(m, d)):
        w = decode(code, word_length(d), m)
        assert central_code(code, d, 1, m) == encode(w[1:4], m)
    left, right = transition_codes(m, d)
    for ext in range(m ** (2 * d + 2)):
        w = decode(ext, 2 * d + 2, m)
        assert left[ext] == encode(w[:-1], m) and right[ext] == encode(w[1:], m)


def test_sliding_codes_direct():
    sym = np.array([0, 1, 1, 0, 1, 0, 0, 1])
    codes = sliding_codes(sym, 3, 2)
    assert list(codes) == [encode(sym[i:i + 3], 2) for i in range(6)]


# --- shift ---------------------------------------------------------------------------

def test_constant_sequence_fixed():
    x = BasePoint.constant(0)
    assert shift_step(x) == x


def test_period_two_orbit():
    x = BasePoint.periodic((0, 1))
    y = shift_step(x)
    assert y != x
    assert y.symbol(0) == 1 and y.symbol(1) == 0
    assert shift_step(y) == x


def test_enumeration_point_shift_matches_direct_indexing():
    # oracle: concatenate all words of length 1, 2, ... by hand
    seq = []
    for ell in range(1, 8):
        for w in itertools.product(range(2), repeat=ell):
            seq.extend(w)
    x = BasePoint(2, EnumerationFill(2))
    for k in (0, 1, 5, 17, 100, 333):
        window = shift_step_k(x, k).window(4)
        direct = tuple(seq[k + i] if k + i >= 0 else 0 for i in range(-4, 5))
        assert window == direct


def shift_step_k(x, k):
    for _ in range(k):
        x = shift_step(x)
    return x


@given(windows(), st.integers(-5, 5))
def test_shift_window_recentred(w, k):
    x = point(w)
    assert x.shift(k).symbols(-3, 4).tolist() == x.symbols(k - 3, k + 4).tolist()


# --- metric --------------------------------------------------------------------------

def test_metric_examples():
    x = point([0] * 13)
    assert base_metric(x, x) == 0.0
    y = BasePoint.from_window([0] * 9 + [1], start=-6)   # differs first at i = 3
    assert base_metric(x, y) == 0.125
    z = BasePoint.from_window([1], start=-3)
    assert base_metric(x, z) == 0.125


@given(windows(radius=5), windows(radius=5), windows(radius=5))
def test_metric_ultrametric_and_symmetric(a, b, c):
    x, y, z = point(a), point(b), point(c)
    assert base_metric(x, y) == base_metric(y, x)
    assert base_metric(x, z) <= max(base_metric(x, y), base_metric(y, z))


def test_ultrametric_ten_thousand_triples():
    rng = np.random.default_rng(1)
    for _ in range(10_000):
        # draw close points by copying a common core
        core = rng.integers(0, 2, 13)
        pts = []
        for _ in range(3):
            w = core.copy()
            flips = rng.integers(0, 13, rng.integers(0, 3))
            w[flips] ^= 1
            pts.append(point(w.tolist()))
        x, y, z = pts
        assert base_metric(x, z) <= max(base_metric(x, y), base_metric(y, z))


@given(windows(radius=6), windows(radius=6))
def test_shift_distorts_metric_by_at_most_two(a, b):
    x, y = point(a), point(b)
    d, ds = base_metric(x, y), base_metric(x.shift(1), y.shift(1))
    if d == 0:
        assert ds == 0
    else:
        assert d / 2 <= ds <= 2 * d


def test_equality_horizon():
    far = BasePoint.from_window([1], start=70)
    assert far == BasePoint.constant(0)
    near = BasePoint.from_window([1], start=60)
    assert near != BasePoint.constant(0)


def test_bad_alphabet_rejected():
    with pytest.raises(DomainError):
        BasePoint.periodic((0, 2), m=2)


# --- transitive point ----------------------------------------------------------------

@pytest.mark.parametrize("depth,m", [(0, 2), (1, 2), (2, 2), (3, 2), (1, 3), (4, 2)])
def test_transitive_point_covers_within_horizon(depth, m):
    x, N = transitive_point(depth, m)
    L = 2 * depth + 1
    seen = {x.shift(n).code(depth) for n in range(N + 1)} if N < 3000 else \
        set(sliding_codes(x.symbols(-depth, N + depth + 1), L, m).tolist())
    assert seen == set(range(m**L))


def test_transitive_depth_one_hits_all_eight():
    x, N = transitive_point(1, 2)
    hits = {}
    for n in range(N + 1):
        hits.setdefault(x.shift(n).window(1), n)
    assert len(hits) == 8 and max(hits.values()) == N


def test_transitive_depth_zero():
    x, N = transitive_point(0, 2)
    assert {x.shift(n).symbol(0) for n in range(N + 1)} == {0, 1}


# --- periodic orbits -----------------------------------------------------------------

def brute_force_necklaces(m, max_period):
    """Cyclic classes of primitive words, by explicit rotation sets."""
    classes = set()
    for n in range(1, max_period + 1):
        for w in itertools.product(range(m), repeat=n):
            rots = {w[k:] + w[:k] for k in range(n)}
            if len(rots) == n:
                classes.add(min(rots))
    return classes


def test_orbit_counts_small():
    assert [o.word for o in enumerate_periodic_orbits(1)] == [(0,), (1,)]
    assert [o.word for o in enumerate_periodic_orbits(2)] == [(0,), (1,), (0, 1)]
    orbits = enumerate_periodic_orbits(4)
    assert len(orbits) == 8
    assert [sum(1 for o in orbits if o.period == n) for n in range(1, 5)] == [2, 1, 2, 3]


@pytest.mark.parametrize("m,n", [(2, 6), (2, 9), (3, 5), (4, 3)])
def test_orbits_match_brute_force(m, n):
    got = [o.word for o in enumerate_periodic_orbits(n, m)]
    assert len(got) == len(set(got))
    assert set(got) == brute_force_necklaces(m, n)


def test_orbit_count_matches_moebius_formula():
    def mobius(k):
        out, p, kk = 1, 2, k
        while p * p <= kk:
            if kk % p == 0:
                kk //= p
                if kk % p == 0:
                    return 0
                out = -out
            p += 1
        return -out if kk > 1 else out

    exact = lambda n: sum(mobius(n // d) * 2**d for d in range(1, n + 1) if n % d == 0) // n
    orbits = enumerate_periodic_orbits(12)
    for n in range(1, 13):
        assert sum(1 for o in orbits if o.period == n) == exact(n)


def test_orbit_cap():
    with pytest.raises(ResourceError):
        enumerate_periodic_orbits(30)


@given(st.lists(st.integers(0, 2), min_size=1, max_size=8))
def test_periodic_point_returns(word):
    orbit = PeriodicOrbit(tuple(word), 3)
    p = orbit.point()
    assert p.shift(orbit.period) == p


def test_window_codes_match_points():
    orbit = PeriodicOrbit((0, 1, 1, 0, 1), 2)
    assert orbit.window_codes(2) == [orbit.point(j).code(2) for j in range(5)]


# --- closing -------------------------------------------------------------------------

def test_closing_periodic_input():
    x = BasePoint.periodic((0, 1, 1))
    assert closing_point(x, 3).point() == x


def test_closing_constant():
    x = BasePoint.from_window([0, 0, 0, 1], start=0)
    assert closing_point(x, 1).point() == BasePoint.constant(0)


def test_closing_requires_near_return():
    x = BasePoint.from_window([0, 1], start=0)
    with pytest.raises(DomainError):
        closing_point(x, 1)


def splice_point(x, p):
    """The auxiliary point: ``p`` on negative indices, ``x`` from index 0 on."""
    lo, hi = -80, 80
    idx = np.arange(lo, hi)
    word = np.where(idx < 0, p.point().symbols(lo, hi), x.symbols(lo, hi))
    return BasePoint.from_window(word.tolist(), x.m, start=lo)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=8), st.integers(1, 5),
       st.lists(st.integers(0, 1), min_size=10, max_size=10))
def test_closing_bound_index_by_index(w, reps, tail):
    k = len(w)
    # x repeats w a few times, then an arbitrary tail
    word = list(w) * (reps + 1) + tail
    x = BasePoint.from_window(list(w) * 3 + word, start=-3 * k)
    gap = base_metric(x, x.shift(k))
    if not gap < 1:
        return
    p = closing_point(x, k)
    assert p.word == tuple(w)
    delta = FULL_SHIFT_CLOSING.c * gap
    for j in range(k + 1):
        bound = delta * math.exp(-FULL_SHIFT_CLOSING.lam * min(j, k - j))
        assert base_metric(x.shift(j), p.point().shift(j)) <= bound * (1 + 1e-12)
    assert exponentially_close(x, p.point(), k, delta)
    # the spliced point shadows x forwards and p backwards
    y = splice_point(x, p)
    for j in range(12):
        assert base_metric(y.shift(j), x.shift(j)) <= delta * 2.0**-j
        assert base_metric(y.shift(-j), p.point().shift(-j)) <= delta * 2.0**-j
