"""Arithmetic progressions, Farey slopes, Dirichlet pairs and ratio sets of APs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..dyadic import DyadicSet, dyadic_exponent, resolve_level

__all__ = [
    "ap_set",
    "farey_fractions",
    "farey_slopes",
    "dirichlet_approx",
    "dirichlet_approx_many",
    "RatioCoverReport",
    "ratio_set_covering",
    "ABCWitness",
    "abc_ratio_construction",
]


def ap_set(gap, level, domain=(0, 1)) -> DyadicSet:
    """Maximal AP with dyadic ``gap`` starting at the left end of the half-open ``domain``."""
    k = resolve_level(level)
    g = dyadic_exponent(gap)
    if g > k:
        raise ValueError("gap is finer than the set scale")
    lo, hi = (Fraction(v) * (1 << k) for v in domain)
    if lo.denominator != 1 or hi.denominator != 1:
        raise ValueError("domain endpoints must lie on the grid")
    step = 1 << (k - g)
    return DyadicSet(np.arange(int(lo), int(hi), step, dtype=np.int64), k, 1)


def farey_fractions(Q: int) -> list[Fraction]:
    """Reduced fractions in ``[0, 1]`` with denominator at most ``Q``, increasing."""
    if Q < 1:
        raise ValueError("Q must be positive")
    a, b, c, d = 0, 1, 1, Q
    out = [Fraction(0)]
    while c <= Q:
        k = (Q + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
        out.append(Fraction(a, b))
    return out


def farey_slopes(Q: int, scale) -> DyadicSet:
    """Farey fractions of order ``Q`` snapped down to cells of the given scale.

    The slope 1 lands in the cell ``[1, 1 + delta)``.
    """
    k = resolve_level(scale)
    idx = [(f.numerator << k) // f.denominator for f in farey_fractions(Q)]
    return DyadicSet(idx, k, 1)


def _check_mn(m: int, n: int) -> None:
    if not (1 <= m <= n and n % m == 0):
        raise ValueError("need 1 <= m <= n with m dividing n")


def dirichlet_approx(m: int, n: int, x) -> tuple[int, int]:
    """``(a, b)`` with ``a`` in ``A - A``, ``b`` in ``(B - B) \\ {0}`` and ``|x - a/b| <= m/(|b| n)``.

    ``A = {0..n}``, ``B = {0, m, .., n}``. Pigeonholes the fractional parts of
    ``k m x`` for ``k = 0..n/m``; the first closest adjacent pair after a
    stable sort wins and ``b > 0``.
    """
    x = Fraction(x)
    _check_mn(m, n)
    if not 0 <= x <= 1:
        raise ValueError("x must lie in [0, 1]")
    p, q = x.numerator, x.denominator
    K = n // m
    whole = [(k * m * p) // q for k in range(K + 1)]
    rem = [(k * m * p) % q for k in range(K + 1)]
    order = sorted(range(K + 1), key=lambda k: (rem[k], k))
    r = min(range(K), key=lambda r: (rem[order[r + 1]] - rem[order[r]], r))
    i, j = max(order[r], order[r + 1]), min(order[r], order[r + 1])
    a = whole[i] - whole[j]
    b = (i - j) * m
    if abs(p * b - a * q) * n > m * q:
        raise AssertionError("pigeonhole pair failed the approximation bound")
    return a, b


def dirichlet_approx_many(m: int, n: int, p, q) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``dirichlet_approx`` for ``x = p/q`` (integer arrays, ``0 <= p <= q``).

    Same pair as the scalar version. Integer arithmetic only, so it is exact
    while ``n * q`` fits comfortably in int64.
    """
    _check_mn(m, n)
    p = np.asarray(p, dtype=np.int64).reshape(-1)
    q = np.broadcast_to(np.asarray(q, dtype=np.int64), p.shape)
    if np.any(q <= 0) or np.any(p < 0) or np.any(p > q):
        raise ValueError("need 0 <= p <= q")
    if int(q.max(initial=1)) > (1 << 62) // (4 * n * n):
        raise ValueError("denominators too large for exact int64 arithmetic")
    K = n // m
    V = (m * np.arange(K + 1, dtype=np.int64))[None, :] * p[:, None]
    whole, rem = V // q[:, None], V % q[:, None]
    order = np.argsort(rem, axis=1, kind="stable")
    srem = np.take_along_axis(rem, order, axis=1)
    r = np.argmin(np.diff(srem, axis=1), axis=1)
    rows = np.arange(len(p))
    k0, k1 = order[rows, r], order[rows, r + 1]
    i, j = np.maximum(k0, k1), np.minimum(k0, k1)
    return whole[rows, i] - whole[rows, j], (i - j) * m


@dataclass(frozen=True)
class RatioCoverReport:
    covering: int
    scale: Fraction
    target: Fraction
    n_ratios: int
    mode: str

    @property
    def constant(self) -> Fraction:
        """Measured ``c`` with ``covering = c * target``."""
        return Fraction(self.covering) / self.target


def _ratio_cells(n0: int, g: int, scale: Fraction) -> tuple[int, int]:
    """Covering of ``[0,1] & {a/b : a in {-n0..n0}, b in g Z, 0 < |b| <= n0}`` by ``[i r, (i+1) r)``."""
    a = np.arange(0, n0 + 1, dtype=np.int64)
    b = np.arange(g, n0 + 1, g, dtype=np.int64)
    A, B = np.meshgrid(a, b, indexing="ij")
    keep = A <= B
    num, den = A[keep], B[keep]
    # a/b in [0,1] is only reached with a, b of equal sign, so b > 0 covers it
    p, q = scale.numerator, scale.denominator
    cells = (num * q) // (den * p)
    distinct = len({Fraction(int(x), int(y)) for x, y in zip(num.tolist(), den.tolist())})
    return int(len(np.unique(cells))), distinct


def ratio_set_covering(n: int, B_spec, scale=None) -> RatioCoverReport:
    """Covering number of ``[0, 1] & (A - A) / ((B - B) \\ {0})`` with ``A = {0..n}``.

    ``B_spec`` is either an integer ``m`` dividing ``n`` (``B = {0, m, .., n}``,
    counted at scale ``m / n**2`` against ``n**2 / m``) or a triple
    ``(b0, gap, count)`` describing an AP inside ``{0..n}`` (counted at
    ``1 / (|B| D)`` against ``|B| D``). The scale is an exact grid
    ``[i r, (i+1) r)`` and may be overridden.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if isinstance(B_spec, (int, np.integer)):
        m = int(B_spec)
        _check_mn(m, n)
        n0, g, mode = n, m, "full"
        target = Fraction(n * n, m)
        default = Fraction(m, n * n)
    else:
        b0, g, count = (int(v) for v in B_spec)
        if g < 1 or count < 2:
            raise ValueError("the AP needs gap >= 1 and at least two terms")
        b1 = b0 + g * (count - 1)
        if b0 < 0 or b1 > n:
            raise ValueError("the AP must lie in {0..n}")
        # differences of the AP and of A inside its window are all that a
        # ratio in [0, 1] can use, so this is the full case on {0..D}
        n0, mode = b1 - b0, "window"
        target = Fraction(count * n0)
        default = 1 / target
    r = default if scale is None else Fraction(scale)
    cov, distinct = _ratio_cells(n0, g, r)
    return RatioCoverReport(cov, r, target, distinct, mode)


@dataclass
class ABCWitness:
    A_target: int
    B_target: int
    C_target: int
    gap_B: int
    I_index: int
    A: list[Fraction]
    B: list[Fraction]
    C: list[Fraction]
    C_covering: int
    max_sum: int
    argmax_c: Fraction
    sums: dict[Fraction, int]

    @property
    def K(self) -> float:
        """Measured constant ``max_c |A + cB| / sqrt(A B C)``."""
        return self.max_sum / math.sqrt(self.A_target * self.B_target * self.C_target)

    def holds(self, K) -> bool:
        """Exact test of ``max_c |A + cB| <= K sqrt(A B C)``."""
        K = Fraction(K)
        return self.max_sum**2 <= K * K * self.A_target * self.B_target * self.C_target


def _sum_count(nA: int, b_idx: np.ndarray, c: Fraction) -> int:
    """``|A + cB|`` with ``A = {0..nA}/nA`` and ``B = b_idx/nA``, exactly."""
    p, q = c.numerator, c.denominator
    vals = q * np.arange(nA + 1, dtype=np.int64)[:, None] + p * b_idx[None, :]
    return int(len(np.unique(vals)))


def abc_ratio_construction(A: int, B: int, C: int) -> ABCWitness:
    """Sets of sizes about ``A, B, C`` with ``|A + cB|`` about ``sqrt(ABC)`` for every ``c``."""
    if min(A, B, C) < 1:
        raise ValueError("targets must be positive integers")
    if not (A >= max(B, C) and A <= B * C):
        raise ValueError("need A >= max(B, C) and A <= B C")
    # largest integer m in [A/(2B), A/B]
    m = A // B
    if 2 * B * m < A:
        raise AssertionError("no integer gap in [A/(2B), A/B]")
    # largest i with i/A <= sqrt(C/(A B))
    i = math.isqrt((C * A) // B)
    ib = (i // m) * m
    if ib == 0:
        raise AssertionError("the window holds no nonzero element of B")
    A_idx = list(range(A + 1))
    B_idx = np.arange(0, A + 1, m, dtype=np.int64)
    ratios = sorted(
        {Fraction(p, k * m) for k in range(1, ib // m + 1) for p in range(0, k * m + 1)}
    )
    cov = len({(c.numerator * C) // c.denominator for c in ratios})
    sums = {c: _sum_count(A, B_idx, c) for c in ratios}
    best = max(ratios, key=lambda c: (sums[c], -c))
    return ABCWitness(
        A_target=A,
        B_target=B,
        C_target=C,
        gap_B=m,
        I_index=i,
        A=[Fraction(j, A) for j in A_idx],
        B=[Fraction(int(j), A) for j in B_idx],
        C=ratios,
        C_covering=cov,
        max_sum=sums[best],
        argmax_c=best,
        sums=sums,
    )
