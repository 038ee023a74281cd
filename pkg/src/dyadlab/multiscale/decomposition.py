"""Superlinear decompositions of Lipschitz functions and the derived index classes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .branching import PiecewiseLinear, _Interpolating

__all__ = [
    "Decomposition",
    "DecompositionError",
    "AffineMajorant",
    "IndexClassification",
    "as_function",
    "sigma_star",
    "superlinear_check",
    "decompose",
    "default_tau",
    "affine_majorant",
    "classify",
]


def as_function(f) -> _Interpolating:
    if isinstance(f, _Interpolating):
        return f
    return PiecewiseLinear(f)


def default_tau(d, xi) -> Fraction:
    return Fraction(xi) ** 2 / (8 * Fraction(d))


def superlinear_check(f, a, b, sigma, eps) -> bool:
    """``f(x) >= f(a) + sigma (x - a) - eps (b - a)`` for all ``x`` in ``[a, b]``.

    ``f`` is piecewise linear with integer breakpoints, so checking ``a``,
    ``b`` and the integers between them is exhaustive.
    """
    f = as_function(f)
    a, b, sigma, eps = (Fraction(v) for v in (a, b, sigma, eps))
    if not a < b:
        raise ValueError("need a < b")
    fa = f(a)
    floor_ = eps * (b - a)
    return all(f(x) >= fa + sigma * (x - a) - floor_ for x in f.breakpoints_in(a, b))


def sigma_star(f, a: int, b: int) -> Fraction:
    """Largest ``sigma`` making ``(f, a, b)`` ``(sigma, 0)``-superlinear (integer ``a < b``)."""
    f = as_function(f)
    v = f.values
    return min(Fraction(v[x] - v[a], x - a) for x in range(a + 1, b + 1))


@dataclass
class Decomposition:
    breakpoints: tuple[Fraction, ...]
    slopes: tuple[Fraction, ...]
    tau: Fraction
    xi: Fraction
    m: int
    f_m: Fraction
    certified: bool = False
    failures: list[str] = field(default_factory=list)

    @property
    def lengths(self) -> tuple[Fraction, ...]:
        b = self.breakpoints
        return tuple(b[i + 1] - b[i] for i in range(len(self.slopes)))

    @property
    def total(self) -> Fraction:
        return sum((ln * t for ln, t in zip(self.lengths, self.slopes)), Fraction(0))

    @property
    def loss(self) -> Fraction:
        return self.f_m - self.total

    def verify(self, f) -> list[str]:
        """Return the violated conditions (empty when everything holds)."""
        f = as_function(f)
        bad = []
        b, t = self.breakpoints, self.slopes
        if b[0] != 0 or b[-1] != self.m:
            bad.append("breakpoints must run from 0 to m")
        for i, ln in enumerate(self.lengths):
            if ln < self.tau * self.m:
                bad.append(f"length: piece {i} has length {ln} < tau*m")
            if not superlinear_check(f, b[i], b[i + 1], t[i], 0):
                bad.append(f"superlinear: piece {i} is not ({t[i]}, 0)-superlinear")
        if self.total < f(self.m) - self.xi * self.m:
            bad.append(f"total: sum {self.total} < f(m) - xi*m")
        if any(t[i] >= t[i + 1] for i in range(len(t) - 1)):
            bad.append("slopes are not strictly increasing")
        return bad

    def to_json(self) -> dict:
        return {
            "tau": str(self.tau),
            "xi": str(self.xi),
            "breakpoints": [str(v) for v in self.breakpoints],
            "slopes": [str(v) for v in self.slopes],
            "certified": self.certified,
        }


class DecompositionError(ValueError):
    """Raised when no candidate could be certified; ``best`` holds the closest one."""

    def __init__(self, msg: str, best: Decomposition):
        super().__init__(msg)
        self.best = best


def _lower_hull(values: Sequence[Fraction]) -> list[int]:
    hull: list[int] = []
    for x in range(len(values)):
        while len(hull) >= 2:
            x0, x1 = hull[-2], hull[-1]
            # drop x1 when it lies on or above the chord x0 -> x
            if (values[x1] - values[x0]) * (x - x0) >= (values[x] - values[x0]) * (x1 - x0):
                hull.pop()
            else:
                break
        hull.append(x)
    return hull


def _best_partition(points: list[int], slope_of, L: Fraction):
    """Maximise ``sum len * slope_of(a, b)`` over chains in ``points`` with pieces ``>= L``."""
    n = len(points)
    best: list[Fraction | None] = [None] * n
    prev = [-1] * n
    best[0] = Fraction(0)
    for i in range(1, n):
        for p in range(i - 1, -1, -1):
            if best[p] is None or points[i] - points[p] < L:
                continue
            val = best[p] + (points[i] - points[p]) * slope_of(p, i)
            if best[i] is None or val > best[i]:
                best[i], prev[i] = val, p
    if best[-1] is None:
        return None
    chain, i = [n - 1], n - 1
    while prev[i] >= 0:
        i = prev[i]
        chain.append(i)
    return [points[i] for i in reversed(chain)]


def _merge_non_increasing(f, cuts: list[int]) -> tuple[list[int], list[Fraction]]:
    slopes = [sigma_star(f, cuts[i], cuts[i + 1]) for i in range(len(cuts) - 1)]
    i = 0
    while i < len(slopes) - 1:
        if slopes[i + 1] <= slopes[i]:
            del cuts[i + 1]
            slopes[i : i + 2] = [sigma_star(f, cuts[i], cuts[i + 1])]
            i = max(i - 1, 0)
        else:
            i += 1
    return cuts, slopes


def _check_input(f, d) -> None:
    v = f.values
    if v[0] != 0:
        raise ValueError("f(0) must be 0")
    if not f.is_lipschitz(d):
        raise ValueError(f"f must be non-decreasing and {d}-Lipschitz on integers")


def decompose(f, d=2, xi=Fraction(1, 10), tau=None) -> Decomposition:
    """Partition ``[0, m]`` into long superlinear pieces with increasing slopes.

    The lower convex hull of ``f`` has integer vertices where ``f`` equals the
    hull, and on a group of consecutive hull pieces ``f`` is superlinear with
    the group's first slope. Groups are chosen by an exact dynamic program
    over hull vertices. If that cannot be certified (long pieces forced to
    absorb steep neighbours), a second program over hull vertices plus a
    ``ceil(tau m)`` grid with exact ``sigma*`` slopes is tried.
    """
    f = as_function(f)
    d, xi = Fraction(d), Fraction(xi)
    tau = default_tau(d, xi) if tau is None else Fraction(tau)
    if not 0 < tau <= 1:
        raise ValueError("tau must lie in (0, 1]")
    _check_input(f, d)
    m = f.m
    if m < 1:
        raise ValueError("need m >= 1")
    v = f.values
    L = tau * m

    hull = _lower_hull(v)
    hslope = [Fraction(v[hull[i + 1]] - v[hull[i]], hull[i + 1] - hull[i]) for i in range(len(hull) - 1)]
    # a group of hull pieces hull[p..i] is superlinear with slope hslope[p]
    cuts = _best_partition(hull, lambda p, i: hslope[p], L)
    candidates = []
    if cuts is not None:
        idx = {x: n for n, x in enumerate(hull)}
        slopes = [hslope[idx[cuts[i]]] for i in range(len(cuts) - 1)]
        candidates.append(_finish(f, cuts, slopes, tau, xi))
        if candidates[-1].certified:
            return candidates[-1]

    g = max(1, math.ceil(L))
    grid = sorted(set(hull) | set(range(0, m + 1, g)) | {m})
    cuts = _best_partition(grid, lambda p, i: sigma_star(f, grid[p], grid[i]), L)
    if cuts is not None:
        cuts, slopes = _merge_non_increasing(f, cuts)
        candidates.append(_finish(f, cuts, slopes, tau, xi))
        if candidates[-1].certified:
            return candidates[-1]
    if not candidates:
        raise ValueError("tau * m exceeds m; no admissible partition")
    best = max(candidates, key=lambda c: (len(c.failures) == 0, c.total))
    raise DecompositionError("could not certify the decomposition: " + "; ".join(best.failures), best)


def _finish(f, cuts, slopes, tau, xi) -> Decomposition:
    dec = Decomposition(
        breakpoints=tuple(Fraction(c) for c in cuts),
        slopes=tuple(slopes),
        tau=tau,
        xi=xi,
        m=f.m,
        f_m=f.values[-1],
    )
    dec.failures = dec.verify(f)
    dec.certified = not dec.failures
    return dec


@dataclass
class AffineMajorant:
    """The convex piecewise-affine ``F`` with ``F(0) = 0`` and slope ``t_j`` on piece ``j``."""

    breakpoints: tuple[Fraction, ...]
    slopes: tuple[Fraction, ...]
    values: tuple[Fraction, ...]
    error: Fraction
    lower_ok: bool
    upper_ok: bool
    pairwise_error: Fraction
    pairwise_ok: bool

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        b = self.breakpoints
        if x < 0 or x > b[-1]:
            raise ValueError(f"{x} outside [0, {b[-1]}]")
        for i in range(len(self.slopes)):
            if x <= b[i + 1]:
                return self.values[i] + self.slopes[i] * (x - b[i])
        return self.values[-1]

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.upper_ok and self.pairwise_ok


def affine_majorant(dec: Decomposition, f) -> AffineMajorant:
    """Build ``F`` and check ``F(a_j) <= f(a_j) <= F(a_j) + xi m`` plus the pairwise bound."""
    f = as_function(f)
    vals = [Fraction(0)]
    for ln, t in zip(dec.lengths, dec.slopes):
        vals.append(vals[-1] + ln * t)
    gaps = [f(a) - Fa for a, Fa in zip(dec.breakpoints, vals)]
    bound = dec.xi * dec.m
    pair = max(abs(gi - gj) for gi in gaps for gj in gaps)
    return AffineMajorant(
        breakpoints=dec.breakpoints,
        slopes=dec.slopes,
        values=tuple(vals),
        error=max(gaps),
        lower_ok=min(gaps) >= 0,
        upper_ok=max(gaps) <= bound,
        pairwise_error=pair,
        pairwise_ok=pair <= bound,
    )


@dataclass
class IndexClassification:
    I1: tuple[int, ...]
    I1_big: tuple[int, ...]
    I1_small: tuple[int, ...]
    I2: tuple[int, ...]
    I3: tuple[int, ...]
    A1: Fraction
    A2: Fraction
    A: Fraction
    # classes and boundary used by the Katz-Tao product bookkeeping
    J1: tuple[int, ...]
    J2: tuple[int, ...]
    split_point: Fraction


def _right_end(dec: Decomposition, idx, default) -> Fraction:
    return dec.breakpoints[max(idx) + 1] if idx else Fraction(default)


def classify(dec: Decomposition, s, t, eta) -> IndexClassification:
    s, t, eta = Fraction(s), Fraction(t), Fraction(eta)
    sl = dec.slopes
    n = range(len(sl))
    I1 = tuple(j for j in n if sl[j] <= s)
    I2 = tuple(j for j in n if s < sl[j] < 2 - s)
    # at s = 1 the closed classes [0, s] and [2 - s, 2] share t_j = 1; it goes to I1
    I3 = tuple(j for j in n if sl[j] >= 2 - s and sl[j] > s)
    A1 = _right_end(dec, I1, 0)
    # slopes increase, so each class is a run and [A1, A2] is the union over I2
    A2 = _right_end(dec, I2, A1)
    J1 = I1
    J2 = tuple(j for j in n if s < sl[j] <= 2 - s)
    return IndexClassification(
        I1=I1,
        I1_big=tuple(j for j in I1 if sl[j] >= 2 * eta),
        I1_small=tuple(j for j in I1 if sl[j] < 2 * eta),
        I2=I2,
        I3=I3,
        A1=A1,
        A2=A2,
        A=(1 - t / 2) * dec.m,
        J1=J1,
        J2=J2,
        split_point=_right_end(dec, J1, 0),
    )
