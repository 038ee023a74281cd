import io
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyadlab import DyadicSet
from dyadlab.multiscale import (
    BranchingFunction,
    PiecewiseLinear,
    branching_function,
    is_uniform,
    read_branching,
    uniformization_loss_exponent,
    uniformize,
    write_branching,
)


def random_tree(rnd: random.Random, T: int, m: int, dim: int = 2, budget: int = 3000) -> DyadicSet:
    """Random set at level ``T m`` grown top down with a varying number of children per cell."""
    cells = [(0,) * dim]
    side = 1 << T
    for j in range(m):
        cap = max(1, budget // max(1, len(cells)))
        nxt = []
        for c in cells:
            n = min(side**dim, cap, 1 << rnd.randint(0, min(6, T * dim)))
            n = rnd.randint(max(1, n // 2), n)
            picks = set()
            while len(picks) < n:
                picks.add(tuple(rnd.randrange(side) for _ in range(dim)))
            nxt.extend(tuple((ci << T) + pi for ci, pi in zip(c, p)) for p in picks)
        cells = nxt
    return DyadicSet(cells, T * m, dim)


def test_full_grid_is_uniform():
    G = DyadicSet.full_grid(4)
    ok, seq = is_uniform(G, 2, 2)
    assert ok and seq == (16, 16)
    f = branching_function(G, 2, 2)
    assert f.exact and f.values == (0, 2, 4)
    assert f.counts == (1, 16, 256)


def test_branching_counts_match_covering():
    rnd = random.Random(5)
    P = random_tree(rnd, 3, 3)
    f = branching_function(P, 3, 3)
    for j, c in enumerate(f.counts):
        assert c == len(P.cover(3 * j))
        # stored value is a lower bound within the slack
        true = Fraction(math.log2(c)) / 3
        assert f.values[j] <= true + Fraction(1, 10**12)
        assert true - f.values[j] <= f.slack + Fraction(1, 10**12)


def test_branching_exact_for_powers_of_two():
    P = DyadicSet([[0, 0], [0, 1], [1, 0], [1, 1]], 2)
    f = branching_function(P, 1, 2)
    assert f.exact and f.slack == 0
    assert f.values == (0, 0, 2)


def test_branching_needs_matching_level():
    with pytest.raises(ValueError):
        branching_function(DyadicSet([[0, 0]], 5), 2, 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 3), st.integers(0, 2**32))
def test_uniformize_invariants(T, m, seed):
    P = random_tree(random.Random(seed), T, m, budget=800)
    Q = uniformize(P, T, m)
    ok, seq = is_uniform(Q, T, m)
    assert ok and all(n is not None for n in seq)
    # subset of P
    assert all(c in P for c in Q.tuples()[:50])
    assert len(np.unique(np.vstack([P.cells, Q.cells]), axis=0)) == len(P)
    # at most a factor 4T lost per level
    assert len(Q) * (4 * T) ** m >= len(P)
    # the size of a uniform set is the product of its branching numbers
    assert len(Q) == math.prod(seq)


def test_uniformize_keeps_uniform_input():
    G = DyadicSet.full_grid(4)
    assert uniformize(G, 2, 2) == G


def test_uniformize_deterministic():
    P = random_tree(random.Random(11), 3, 3)
    assert uniformize(P, 3, 3) == uniformize(P, 3, 3)


def test_loss_exponent():
    assert uniformization_loss_exponent(4) == pytest.approx(3 / 4)


def test_piecewise_linear_interpolation():
    f = PiecewiseLinear([0, 2, 2, 3])
    assert f(Fraction(1, 2)) == 1
    assert f(Fraction(5, 2)) == Fraction(5, 2)
    assert f.breakpoints_in(Fraction(1, 2), 2) == [Fraction(1, 2), 1, 2]
    assert f.is_lipschitz(2) and not f.is_lipschitz(1)
    with pytest.raises(ValueError):
        f(4)


def test_branching_file_round_trip():
    f = BranchingFunction.from_values(3, [0, Fraction(1, 3), Fraction(5, 6), 2])
    buf = io.StringIO()
    write_branching(f, 3, buf)
    buf.seek(0)
    g = read_branching(buf)
    assert g.T == 3 and g.values == f.values
