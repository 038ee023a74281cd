import io
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyadlab import (
    DyadicInterval,
    DyadicSet,
    DyadicSquare,
    covering_number,
    neighborhood,
    refine,
    renormalize,
    resolve_level,
    scale_set,
)
from dyadlab.dyadic import dyadic_exponent, read_set, write_set


def cells_2d(level_max=6, max_size=40):
    return st.integers(1, level_max).flatmap(
        lambda k: st.tuples(
            st.just(k),
            st.lists(
                st.tuples(st.integers(0, (1 << k) - 1), st.integers(0, (1 << k) - 1)),
                min_size=1,
                max_size=max_size,
            ),
        )
    )


def brute_cover(cells, k, j):
    """Cells of level ``j`` meeting the union, found by comparing rational endpoints."""
    out = set()
    side_k, side_j = Fraction(1, 1 << k), Fraction(1, 1 << j)
    for c in cells:
        # the lower-left corner lies in exactly one coarser cell
        out.add(tuple(int((v * side_k) // side_j) for v in c))
    return out


def test_resolve_level_rounds_to_finer_scale():
    assert resolve_level(Fraction(1, 8)) == 3
    assert resolve_level(Fraction(1, 10)) == 4
    assert resolve_level(Fraction(3, 4)) == 1
    assert resolve_level(1) == 1
    assert resolve_level(Fraction(1)) == 0
    assert resolve_level(2) == 2
    with pytest.raises(ValueError):
        resolve_level(-1)
    with pytest.raises(ValueError):
        resolve_level(Fraction(0))


@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_resolve_level_is_largest_dyadic_below(p, q):
    r = Fraction(p, q)
    n = resolve_level(r)
    if r >= 1:
        assert n == 0
    else:
        assert Fraction(1, 1 << n) <= r < Fraction(2, 1 << n)


def test_dyadic_exponent():
    assert dyadic_exponent(Fraction(1, 64)) == 6
    assert dyadic_exponent(4) == -2
    with pytest.raises(ValueError):
        dyadic_exponent(Fraction(1, 3))


def test_half_open_cells():
    I = DyadicInterval(2, 1)
    assert I.bounds() == (Fraction(1, 4), Fraction(1, 2))
    Q = DyadicSquare(3, 5, 2)
    assert Q.ancestor(1) == DyadicSquare(1, 1, 0)
    assert DyadicSquare(1, 1, 0).contains(Q)
    assert not DyadicSquare(1, 0, 0).contains(Q)


def test_set_dedups_and_sorts():
    S = DyadicSet([[3, 1], [0, 2], [3, 1]], 2)
    assert len(S) == 2
    assert S.tuples() == [(0, 2), (3, 1)]
    assert (3, 1) in S and DyadicSquare(2, 0, 2) in S
    assert DyadicSquare(3, 0, 2) not in S
    assert DyadicSet([], 3, 2).cells.shape == (0, 2)


def test_covering_number_small_cases():
    S = DyadicSet([0, 4, 8, 12], 4, 1)
    assert covering_number(S, Fraction(1, 4)) == 4
    assert covering_number(S, 1) == 2
    assert covering_number(S, 0) == 1
    # non-dyadic scale resolves to the finer dyadic scale 1/8
    assert covering_number(S, Fraction(1, 5)) == 4
    with pytest.raises(ValueError):
        covering_number(S, 5)


@given(cells_2d(), st.data())
def test_covering_matches_rational_oracle(kc, data):
    k, cells = kc
    j = data.draw(st.integers(0, k))
    S = DyadicSet(cells, k)
    assert covering_number(S, j) == len(brute_cover(cells, k, j))


@given(cells_2d())
def test_covering_monotone_in_scale(kc):
    k, cells = kc
    S = DyadicSet(cells, k)
    counts = [covering_number(S, j) for j in range(k + 1)]
    assert counts == sorted(counts)
    assert counts[-1] == len(S)


@given(cells_2d(level_max=4, max_size=10), st.integers(0, 2))
def test_refine_preserves_union(kc, extra):
    k, cells = kc
    S = DyadicSet(cells, k)
    R = refine(S, k + extra)
    assert len(R) == len(S) * 4**extra
    assert R.cover(k) == S


def test_renormalize_example():
    P = DyadicSet([[4, 4], [5, 7], [0, 0]], 3)
    R = renormalize(P, DyadicSquare(1, 1, 1))
    assert R.level == 2
    assert R.tuples() == [(0, 0), (1, 3)]


def test_scale_set_and_neighbourhood():
    S = DyadicSet([4], 3, 1)
    assert scale_set(S, Fraction(1, 2)).level == 4
    N = neighborhood(S, Fraction(1, 4))
    lo = Fraction(int(N.cells.min()), 8)
    hi = Fraction(int(N.cells.max()) + 1, 8)
    assert (lo, hi) == (Fraction(1, 4), Fraction(7, 8))


@given(cells_2d(level_max=5))
def test_set_file_round_trip(kc):
    k, cells = kc
    S = DyadicSet(cells, k)
    buf = io.StringIO()
    write_set(S, buf)
    buf.seek(0)
    assert read_set(buf) == S


def test_full_grid():
    G = DyadicSet.full_grid(3)
    assert len(G) == 64
    assert np.array_equal(G.cover(1).cells, DyadicSet.full_grid(1).cells)


@settings(max_examples=50)
@given(cells_2d(level_max=5), st.data())
def test_renormalize_counts_match_cover(kc, data):
    k, cells = kc
    S = DyadicSet(cells, k)
    j = data.draw(st.integers(0, k))
    parents = S.cover(j)
    total = sum(len(renormalize(S, DyadicSquare(j, *p))) for p in parents.tuples())
    assert total == len(S)
