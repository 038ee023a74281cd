import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dyadlab.exact import PowerValue, floor_root_pow2

fracs = st.fractions(min_value=Fraction(1, 50), max_value=1000, max_denominator=50)
exps = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@given(fracs, exps, fracs, exps)
def test_ordering_agrees_with_logs(c1, e1, c2, e2):
    a, b = PowerValue(c1, e1), PowerValue(c2, e2)
    la = math.log2(c1) + float(e1)
    lb = math.log2(c2) + float(e2)
    if abs(la - lb) > 1e-9:
        assert (a < b) == (la < lb)


@given(fracs, st.integers(-10, 10))
def test_integral_exponents_are_rational(c, e):
    v = PowerValue(c, e)
    assert v.as_fraction() == c * Fraction(2) ** e
    assert v == PowerValue(c * Fraction(2) ** e)
    assert hash(v) == hash(PowerValue(c * Fraction(2) ** e))


def test_exact_equality_across_representations():
    assert PowerValue(2, Fraction(1, 2)) == PowerValue(1, Fraction(3, 2))
    assert PowerValue(Fraction(1, 2), Fraction(1, 2)) < PowerValue(1)
    assert PowerValue(1, Fraction(1, 2)) > Fraction(141421, 100000)
    with pytest.raises(ValueError):
        PowerValue(0)
    with pytest.raises(ValueError):
        PowerValue(1, Fraction(1, 2)).as_fraction()


def test_json_round_trip():
    v = PowerValue(Fraction(3, 7), Fraction(-5, 3))
    assert PowerValue.from_json(v.to_json()) == v


@given(st.fractions(min_value=0, max_value=30, max_denominator=8))
def test_floor_root_pow2(e):
    Q = floor_root_pow2(e)
    # Q <= 2**e < Q + 1, checked with integer powers
    p, q = e.numerator, e.denominator
    assert Q**q <= 2**p < (Q + 1) ** q
