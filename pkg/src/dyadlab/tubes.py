"""Dyadic tubes under point-line duality, incidences and projections.

A tube at level ``k`` is indexed by ``(ia, ib)``: it is the union of the lines
``y = a x + b`` over the parameter square ``[ia, ia+1) x [ib, ib+1)`` (in
units of ``2**-k``). Its slope is the left edge ``ia * 2**-k``.

Incidence convention: a tube meets the square ``p`` iff some line of the
half-open parameter square passes through a point of the half-open square.
The set ``{a x + b}`` swept over ``p``'s x-extent is an interval whose
infimum and supremum sit at parameter/x corners, which gives an integer test.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import NamedTuple

import numpy as np

from .dyadic import DyadicSet, DyadicSquare, resolve_level
from .exact import PowerValue
from .statistics import worst_slope_frostman

__all__ = [
    "DyadicTube",
    "NiceConfiguration",
    "incidence",
    "incidence_ranges",
    "incident_pairs",
    "tubes_through",
    "build_configuration",
    "project",
    "projection_profile",
    "measure_incidences",
    "read_tubes",
    "write_tubes",
]


class DyadicTube(NamedTuple):
    level: int
    ia: int
    ib: int

    @property
    def slope(self) -> Fraction:
        return Fraction(self.ia, 1 << self.level)

    @property
    def param(self) -> DyadicSquare:
        return DyadicSquare(self.level, self.ia, self.ib)


def _corner_products(ia, ix):
    """Min and max of ``A * X`` over ``A in {ia, ia+1}``, ``X in {ix, ix+1}``."""
    p00 = ia * ix
    p01 = ia * (ix + 1)
    p10 = (ia + 1) * ix
    p11 = (ia + 1) * (ix + 1)
    if isinstance(p00, np.ndarray):
        stack = np.stack([p00, p01, p10, p11])
        return stack.min(axis=0), stack.max(axis=0)
    return min(p00, p01, p10, p11), max(p00, p01, p10, p11)


def incidence(T: DyadicTube, p: DyadicSquare) -> bool:
    """Exact test ``D(T.param) & p != {}`` for a tube and a square of the same level."""
    if T.level != p.level:
        raise ValueError(f"tube level {T.level} differs from square level {p.level}")
    k = T.level
    lo, hi = _corner_products(T.ia, p.ix)
    # inf and sup of {a x + b}, scaled by 2**(2k)
    inf_v = lo + (T.ib << k)
    sup_v = hi + ((T.ib + 1) << k)
    return inf_v < ((p.iy + 1) << k) and sup_v > (p.iy << k)


def incidence_ranges(ia, ix, iy, k: int):
    """Inclusive range of intercept indices ``ib`` whose tube with slope ``ia`` meets ``(ix, iy)``."""
    lo, hi = _corner_products(ia, ix)
    ib_max = -((-(((iy + 1) << k) - lo)) >> k) - 1
    ib_min = ((iy << k) - hi) >> k
    return ib_min, ib_max


def _tube_keys(ia, ib):
    return (np.asarray(ia, dtype=np.int64) << 32) + (np.asarray(ib, dtype=np.int64) + (1 << 31))


def incident_pairs(points: np.ndarray, tubes: np.ndarray, k: int):
    """All incident ``(point_index, tube_index)`` pairs.

    ``points`` is ``(n, 2)``, ``tubes`` is ``(m, 2)`` with distinct rows ``(ia, ib)``.
    Work is ``O(n * distinct slopes)`` rather than ``O(n * m)``.
    """
    points = np.asarray(points, dtype=np.int64).reshape(-1, 2)
    tubes = np.asarray(tubes, dtype=np.int64).reshape(-1, 2)
    if len(points) == 0 or len(tubes) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    keys = _tube_keys(tubes[:, 0], tubes[:, 1])
    order = np.argsort(keys, kind="stable")
    skeys = keys[order]
    if np.any(skeys[1:] == skeys[:-1]):
        raise ValueError("tubes must be distinct")
    ix, iy = points[:, 0], points[:, 1]
    out_p, out_t = [], []
    for ia in np.unique(tubes[:, 0]):
        lo_b, hi_b = incidence_ranges(np.int64(ia), ix, iy, k)
        width = int((hi_b - lo_b).max()) + 1
        for off in range(width):
            ib = lo_b + off
            valid = ib <= hi_b
            key = _tube_keys(np.full_like(ib, ia), ib)
            pos = np.searchsorted(skeys, key)
            pos_c = np.minimum(pos, len(skeys) - 1)
            hit = valid & (skeys[pos_c] == key)
            if hit.any():
                out_p.append(np.nonzero(hit)[0])
                out_t.append(order[pos_c[hit]])
    if not out_p:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(out_p), np.concatenate(out_t)


def tubes_through(p: DyadicSquare, theta: DyadicSet) -> list[DyadicTube]:
    """One tube per slope cell: the one containing the dual line of slope ``ia * delta`` through ``p``'s centre."""
    if theta.dim != 1:
        raise ValueError("slope sets are one-dimensional")
    if theta.level != p.level:
        raise ValueError("slope set and square must share a level")
    k = p.level
    ia = theta.cells[:, 0]
    # b / delta = iy + 1/2 - delta * ia * (ix + 1/2)
    num = (p.iy << (k + 1)) + (1 << k) - ia * (2 * p.ix + 1)
    ib = num >> (k + 1)
    return [DyadicTube(k, int(a), int(b)) for a, b in zip(ia.tolist(), ib.tolist())]


@dataclass
class NiceConfiguration:
    points: DyadicSet
    tubes: tuple[DyadicTube, ...]
    incidences: dict[tuple[int, int], tuple[DyadicTube, ...]]
    level: int
    s: Fraction
    C: PowerValue | None = None
    M: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def delta(self) -> Fraction:
        return Fraction(1, 1 << self.level)

    def incidence_histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(len(v) for v in self.incidences.values()).items()))

    def to_json(self) -> dict:
        return {
            "delta_log2": -self.level,
            "s": str(self.s),
            "C": None if self.C is None else self.C.to_json(),
            "M": self.M,
            "n_points": len(self.points),
            "n_tubes": len(self.tubes),
            "incidence_histogram": {str(k): v for k, v in self.incidence_histogram().items()},
        }


def compute_incidences(points: DyadicSet, tubes, k: int):
    tube_list = list(tubes)
    arr = np.array([[t.ia, t.ib] for t in tube_list], dtype=np.int64).reshape(-1, 2)
    pi, ti = incident_pairs(points.cells, arr, k)
    buckets: dict[int, list[int]] = {}
    for a, b in zip(pi.tolist(), ti.tolist()):
        buckets.setdefault(a, []).append(b)
    inc = {}
    for i, row in enumerate(points.tuples()):
        inc[row] = tuple(sorted(tube_list[j] for j in buckets.get(i, [])))
    return inc


def nice_constant(incidences, level: int, s, M: int) -> PowerValue:
    """Least ``C`` making the incidence data a ``(delta, s, C, M)``-nice configuration."""
    counts = [len(v) for v in incidences.values()]
    lo, hi = min(counts), max(counts)
    if lo == 0:
        raise ValueError("a square has no incident tubes")
    worst = worst_slope_frostman(incidences, level, s)
    return max(PowerValue(Fraction(hi, M)), PowerValue(Fraction(M, lo)), worst)


def build_configuration(P: DyadicSet, theta: DyadicSet, s) -> NiceConfiguration:
    """Assemble ``(P, union of tubes_through(p, theta))`` with certified ``C`` and ``M``."""
    if P.dim != 2:
        raise ValueError("configurations need a 2-D point set")
    if theta.level != P.level:
        raise ValueError("point set and slope set must share a level")
    if len(P) == 0 or len(theta) == 0:
        raise ValueError("empty points or slopes")
    k = P.level
    found = set()
    for p in P:
        found.update(tubes_through(p, theta))
    tubes = tuple(sorted(found))
    inc = compute_incidences(P, tubes, k)
    empty = [p for p, ts in inc.items() if not ts]
    if empty:
        raise ValueError(f"square {empty[0]} meets no tube")
    M = min(len(v) for v in inc.values())
    C = nice_constant(inc, k, s, M)
    return NiceConfiguration(P, tubes, inc, k, Fraction(s), C, M)


def _linear_form(theta, mode: str):
    if mode == "dot":
        a, b = (Fraction(v) for v in theta)
    elif mode in ("slope-sum", "slope_sum"):
        a, b = Fraction(1), Fraction(theta)
    else:
        raise ValueError(f"unknown projection mode {mode!r}")
    D = lcm(a.denominator, b.denominator)
    return int(a * D), int(b * D), D


def project(P: DyadicSet, theta, mode: str = "slope-sum", level=None) -> int:
    """Covering number of the image of ``P`` under a linear functional.

    ``mode="dot"`` uses ``(x, y) . theta`` for a rational pair ``theta``;
    ``mode="slope-sum"`` uses ``x + c y`` with rational ``c = theta``. The
    count is taken at ``P``'s own scale unless a coarser ``level`` is given.
    """
    if P.dim != 2:
        raise ValueError("projection needs a 2-D set")
    if len(P) == 0:
        return 0
    A, B, D = _linear_form(theta, mode)
    j = P.level if level is None else resolve_level(level)
    if j > P.level:
        raise ValueError("projection scale is finer than the set")
    x = P.cells[:, 0]
    y = P.cells[:, 1]
    v00 = A * x + B * y
    corners = np.stack([v00, v00 + A, v00 + B, v00 + A + B])
    lo = corners.min(axis=0)
    hi = corners.max(axis=0)
    start = lo // D
    # the only attained corner is (ix, iy); if it is the max the image is closed on the right
    end = np.where(v00 == hi, hi // D, -((-hi) // D) - 1)
    shift = P.level - j
    start >>= shift
    end >>= shift
    return _union_size(start, end)


def projection_profile(P: DyadicSet, slopes: DyadicSet, level=None) -> np.ndarray:
    """``|x + c y|`` covering numbers for ``c`` the left endpoint of every slope cell."""
    if slopes.dim != 1:
        raise ValueError("slopes are one-dimensional")
    k = slopes.level
    return np.array(
        [project(P, Fraction(int(i), 1 << k), "slope-sum", level) for i in slopes.cells[:, 0]],
        dtype=np.int64,
    )


def _union_size(start: np.ndarray, end: np.ndarray) -> int:
    """Number of integers in the union of the inclusive ranges ``[start_i, end_i]``."""
    order = np.argsort(start, kind="stable")
    s = start[order]
    e = end[order]
    prev = np.maximum.accumulate(e)
    prev = np.concatenate([[s[0] - 1], prev[:-1]])
    return int(np.maximum(0, e - np.maximum(s - 1, prev)).sum())


def measure_incidences(P: DyadicSet, tubes) -> dict:
    """Exact incidence statistics of ``(P, tubes)``: histogram of ``|T(p)|``, ``|T|``, ``M``."""
    tubes = tuple(sorted(set(tubes)))
    inc = compute_incidences(P, tubes, P.level)
    counts = [len(v) for v in inc.values()]
    M = min(counts) if counts else 0
    return {
        "n_points": len(P),
        "n_tubes": len(tubes),
        "M": M,
        "total_incidences": int(sum(counts)),
        "histogram": dict(sorted(Counter(counts).items())),
        "ratio": (Fraction(len(tubes), M) if M else None),
    }


def write_tubes(tubes, level: int, fh) -> None:
    tubes = sorted(set(tubes))
    fh.write(f"{level} {len(tubes)}\n")
    for t in tubes:
        fh.write(f"{t.ia} {t.ib}\n")


def read_tubes(fh) -> list[DyadicTube]:
    k, n = (int(v) for v in fh.readline().split())
    out = []
    for _ in range(n):
        ia, ib = (int(v) for v in fh.readline().split())
        out.append(DyadicTube(k, ia, ib))
    return out
