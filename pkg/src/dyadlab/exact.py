"""Exact numbers of the form ``c * 2**e`` with rational ``c > 0`` and rational ``e``.

Non-concentration ratios such as ``|P & Q| / (r**s |P|)`` with ``r = 2**-j``
and rational ``s`` live in this class; comparing two of them reduces to
comparing integer powers, so no logarithm is ever rounded.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering

__all__ = ["PowerValue", "as_power", "floor_root_pow2"]


@total_ordering
class PowerValue:
    __slots__ = ("coef", "exp")

    def __init__(self, coef, exp=0):
        coef = Fraction(coef)
        if coef <= 0:
            raise ValueError("PowerValue needs a positive coefficient")
        self.coef = coef
        self.exp = Fraction(exp)

    def __mul__(self, other):
        other = as_power(other)
        return PowerValue(self.coef * other.coef, self.exp + other.exp)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_power(other)
        return PowerValue(self.coef / other.coef, self.exp - other.exp)

    def __rtruediv__(self, other):
        return as_power(other) / self

    def _cmp(self, other) -> int:
        other = as_power(other)
        # self ? other  <=>  (c1/c2)**q ? 2**p  with  e2 - e1 = p/q
        d = other.exp - self.exp
        ratio = self.coef / other.coef
        p, q = d.numerator, d.denominator
        lhs = ratio**q
        rhs = Fraction(2) ** p
        return (lhs > rhs) - (lhs < rhs)

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except (TypeError, ValueError):
            return NotImplemented

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __hash__(self):
        # normalise the integral part of the exponent into the coefficient
        whole = math.floor(self.exp)
        return hash((self.coef * Fraction(2) ** whole, self.exp - whole))

    def __float__(self):
        return float(self.coef) * 2.0 ** float(self.exp)

    def log2(self) -> float:
        return math.log2(self.coef) + float(self.exp)

    def is_rational(self) -> bool:
        return self.exp.denominator == 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is irrational")
        return self.coef * Fraction(2) ** int(self.exp)

    def to_json(self) -> dict:
        return {
            "coef_num": self.coef.numerator,
            "coef_den": self.coef.denominator,
            "exp_num": self.exp.numerator,
            "exp_den": self.exp.denominator,
            "approx": float(self),
        }

    @classmethod
    def from_json(cls, d: dict) -> "PowerValue":
        return cls(Fraction(d["coef_num"], d["coef_den"]), Fraction(d["exp_num"], d["exp_den"]))

    def __repr__(self):
        if self.exp == 0:
            return f"PowerValue({self.coef})"
        return f"PowerValue({self.coef} * 2**({self.exp}))"


def as_power(x) -> PowerValue:
    if isinstance(x, PowerValue):
        return x
    return PowerValue(Fraction(x), 0)


def floor_root_pow2(e) -> int:
    """Largest integer ``Q >= 1`` with ``Q <= 2**e`` for rational ``e >= 0``."""
    e = Fraction(e)
    if e < 0:
        raise ValueError("exponent must be non-negative")
    p, q = e.numerator, e.denominator
    target = 1 << p
    # integer q-th root of 2**p
    lo, hi = 1, 1 << (p // q + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**q <= target:
            lo = mid
        else:
            hi = mid - 1
    return lo
