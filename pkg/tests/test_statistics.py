import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyadlab import (
    DyadicSet,
    check_single_scale_nonconcentration,
    frostman_constant,
    katz_tao_constant,
)
from dyadlab.exact import PowerValue
from dyadlab.statistics import single_scale_level

exps = st.sampled_from([Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1), Fraction(3, 2)])


def point_sets(level_max=6):
    return st.integers(1, level_max).flatmap(
        lambda k: st.tuples(
            st.just(k),
            st.lists(
                st.tuples(st.integers(0, (1 << k) - 1), st.integers(0, (1 << k) - 1)),
                min_size=1,
                max_size=60,
            ),
        )
    )


def oracle_log2_constant(cells, k, s, kind):
    """log2 of the best constant, by counting every cell at every level with a dict."""
    n = len(set(cells))
    best = -math.inf
    for j in range(k + 1):
        cnt = Counter((x >> (k - j), y >> (k - j)) for x, y in set(cells))
        top = max(cnt.values())
        if kind == "frostman":
            val = math.log2(top / n) + j * float(s)
        else:
            val = math.log2(top) - (k - j) * float(s)
        best = max(best, val)
    return best


@settings(max_examples=80)
@given(point_sets(), exps)
def test_frostman_matches_oracle(kc, s):
    k, cells = kc
    rep = frostman_constant(DyadicSet(cells, k), s)
    assert rep.best_constant.log2() == pytest.approx(oracle_log2_constant(cells, k, s, "frostman"), abs=1e-9)


@settings(max_examples=80)
@given(point_sets(), exps)
def test_katz_tao_matches_oracle(kc, s):
    k, cells = kc
    rep = katz_tao_constant(DyadicSet(cells, k), s)
    assert rep.best_constant.log2() == pytest.approx(oracle_log2_constant(cells, k, s, "katz_tao"), abs=1e-9)


@settings(max_examples=40)
@given(point_sets(), exps)
def test_constant_is_tight(kc, s):
    k, cells = kc
    rep = frostman_constant(DyadicSet(cells, k), s)
    C = rep.best_constant
    assert rep.holds(C)
    assert not rep.holds(C * PowerValue(Fraction(999, 1000)))


def test_full_grid_constants():
    G = DyadicSet.full_grid(4)
    # every r-cell holds exactly (r/delta)**2 points, so both constants are 1 at s = 2
    assert frostman_constant(G, 2).best_constant == PowerValue(1)
    assert katz_tao_constant(G, 2).best_constant == PowerValue(1)
    # a single point is a (delta, s, 1) Katz-Tao set and has Frostman constant delta**-s
    one = DyadicSet([[3, 5]], 4)
    assert katz_tao_constant(one, 1).best_constant == PowerValue(1)
    assert frostman_constant(one, 1).best_constant == PowerValue(16)


def test_single_scale_nonconcentration():
    G = DyadicSet.full_grid(4)
    # side delta * 256**(1/2) = 1: one cell holds everything
    assert single_scale_level(G) == 0
    ok, cell, cnt = check_single_scale_nonconcentration(G, Fraction(1, 2))
    assert cnt == 256 and not ok
    spread = DyadicSet([[4 * i, 4 * j] for i in range(4) for j in range(4)], 4)
    # 16 points, side delta * 4 = 1/4: each of the 16 cells holds one point
    ok, cell, cnt = check_single_scale_nonconcentration(spread, Fraction(1, 2))
    assert cnt == 1
    # 1 <= 2**(-4 * 1/2) * 16 = 4
    assert ok
    ok, _, _ = check_single_scale_nonconcentration(spread, Fraction(3, 2))
    # 2**(-6) * 16 < 1
    assert not ok


def test_empty_set_rejected():
    with pytest.raises(ValueError):
        frostman_constant(DyadicSet([], 3, 2), 1)
