import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyadlab.multiscale import (
    DecompositionError,
    PiecewiseLinear,
    affine_majorant,
    classify,
    decompose,
    default_tau,
    sigma_star,
    superlinear_check,
)

from conftest import random_lipschitz


def lipschitz_values(max_m=60):
    return st.lists(st.integers(0, 8), min_size=1, max_size=max_m).map(
        lambda inc: [Fraction(0)] + [Fraction(sum(inc[: i + 1]), 4) for i in range(len(inc))]
    )


def oracle_superlinear(values, a, b, sigma, eps, grid=8):
    """Check the inequality on a fine rational grid, which contains every integer breakpoint."""
    f = PiecewiseLinear(values)
    fa = f(a)
    steps = int((b - a) * grid)
    return all(
        f(a + Fraction(i, grid)) >= fa + sigma * Fraction(i, grid) - eps * (b - a) for i in range(steps + 1)
    )


def check_postconditions(values, dec):
    """Independent replay of the three decomposition properties and monotone slopes."""
    m = len(values) - 1
    f = PiecewiseLinear(values)
    b, t = dec.breakpoints, dec.slopes
    assert b[0] == 0 and b[-1] == m
    for i in range(len(t)):
        assert b[i + 1] - b[i] >= dec.tau * m
        for x in range(int(b[i]), int(b[i + 1]) + 1):
            assert f(x) >= f(b[i]) + t[i] * (x - b[i])
    total = sum((b[i + 1] - b[i]) * t[i] for i in range(len(t)))
    assert total >= values[-1] - dec.xi * m
    assert all(t[i] < t[i + 1] for i in range(len(t) - 1))


@settings(max_examples=100)
@given(lipschitz_values(30), st.data())
def test_superlinear_check_matches_grid_oracle(values, data):
    m = len(values) - 1
    if m < 1:
        return
    a = data.draw(st.integers(0, m - 1))
    b = data.draw(st.integers(a + 1, m))
    sigma = data.draw(st.fractions(min_value=0, max_value=2, max_denominator=8))
    eps = data.draw(st.fractions(min_value=0, max_value=1, max_denominator=8))
    assert superlinear_check(values, a, b, sigma, eps) == oracle_superlinear(values, a, b, sigma, eps)


@given(lipschitz_values(30), st.data())
def test_sigma_star_is_the_largest_slope(values, data):
    m = len(values) - 1
    if m < 1:
        return
    a = data.draw(st.integers(0, m - 1))
    b = data.draw(st.integers(a + 1, m))
    s = sigma_star(values, a, b)
    assert superlinear_check(values, a, b, s, 0)
    assert not superlinear_check(values, a, b, s + Fraction(1, 1000), 0)


@settings(max_examples=200, deadline=None)
@given(lipschitz_values(80), st.sampled_from([Fraction(1, 20), Fraction(1, 10), Fraction(1, 4)]))
def test_decompose_postconditions(values, xi):
    if len(values) < 2:
        return
    dec = decompose(values, 2, xi)
    assert dec.certified and not dec.verify(values)
    check_postconditions(values, dec)
    F = affine_majorant(dec, values)
    assert F.ok


def test_decompose_known_shapes():
    # linear: one piece with slope 1
    dec = decompose([Fraction(j) for j in range(21)], 2, Fraction(1, 10))
    assert dec.breakpoints == (0, 20) and dec.slopes == (1,)
    # flat then steep: two pieces, slopes 0 and 2
    vals = [Fraction(0)] * 11 + [Fraction(2 * j) for j in range(1, 11)]
    dec = decompose(vals, 2, Fraction(1, 10))
    assert dec.breakpoints == (0, 10, 20) and dec.slopes == (0, 2)
    assert dec.loss == 0


def test_default_tau():
    assert default_tau(2, Fraction(1, 10)) == Fraction(1, 1600)


def test_decompose_input_validation():
    with pytest.raises(ValueError):
        decompose([1, 2, 3])
    with pytest.raises(ValueError):
        decompose([0, 3, 4])
    with pytest.raises(ValueError):
        decompose([0, 1, 0])
    with pytest.raises(ValueError):
        decompose([0, 1], tau=0)


def test_uncertifiable_request_reports_best_candidate():
    # one piece is forced and it cannot follow the late jump
    vals = [Fraction(0)] * 11 + [Fraction(2 * j) for j in range(1, 11)]
    with pytest.raises(DecompositionError) as info:
        decompose(vals, 2, Fraction(1, 10), tau=1)
    best = info.value.best
    assert not best.certified
    assert any(msg.startswith("total") for msg in best.failures)


def test_majorant_matches_pieces():
    rnd = random.Random(3)
    vals = random_lipschitz(rnd, 50)
    dec = decompose(vals, 2, Fraction(1, 10))
    F = affine_majorant(dec, vals)
    for a, Fa in zip(dec.breakpoints, F.values):
        assert F(a) == Fa
    assert F.error <= dec.xi * dec.m


def test_classify_partitions_indices():
    vals = [Fraction(0)] * 11 + [Fraction(j, 2) for j in range(1, 11)] + [Fraction(5 + 2 * j) for j in range(1, 11)]
    dec = decompose(vals, 2, Fraction(1, 10))
    assert dec.slopes == (0, Fraction(1, 2), 2)
    c = classify(dec, Fraction(1, 2), 1, Fraction(1, 100))
    assert c.I1 == (0, 1) and c.I2 == () and c.I3 == (2,)
    assert c.I1_small == (0,) and c.I1_big == (1,)
    assert c.A1 == 20 and c.A2 == 20 and c.A == 15
    assert c.split_point == 20 and c.J2 == ()
    # at s = 1 the slope 1 is counted once, in the first class
    dec1 = decompose([Fraction(j) for j in range(21)], 2, Fraction(1, 10))
    c1 = classify(dec1, 1, 1, Fraction(1, 100))
    assert c1.I1 == (0,) and c1.I3 == ()
