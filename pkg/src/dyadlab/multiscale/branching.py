"""Branching functions of uniform sets, and extraction of uniform subsets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..dyadic import DyadicSet

__all__ = [
    "PiecewiseLinear",
    "BranchingFunction",
    "branching_function",
    "is_uniform",
    "uniformize",
    "uniformization_loss_exponent",
    "read_branching",
    "write_branching",
]

# log2 of a non power-of-two count is bracketed on this grid; the float
# log2 error for counts below 2**62 is far below the margin
_LOG_BITS = 30
_LOG_MARGIN = 1e-9


class _Interpolating:
    """Linear interpolation of exact values given at ``0, 1, ..., m``."""

    values: tuple[Fraction, ...]
    m: int

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        if x < 0 or x > self.m:
            raise ValueError(f"{x} outside [0, {self.m}]")
        j = math.floor(x)
        if j == x:
            return self.values[j]
        lo, hi = self.values[j], self.values[j + 1]
        return lo + (hi - lo) * (x - j)

    def breakpoints_in(self, a, b) -> list[Fraction]:
        """``a``, ``b`` and every integer strictly between them."""
        a, b = Fraction(a), Fraction(b)
        pts = [a]
        pts.extend(Fraction(j) for j in range(math.floor(a) + 1, math.ceil(b)))
        if b != a:
            pts.append(b)
        return pts

    def is_lipschitz(self, d) -> bool:
        return all(0 <= v1 - v0 <= d for v0, v1 in zip(self.values, self.values[1:]))


class PiecewiseLinear(_Interpolating):
    def __init__(self, values: Sequence):
        self.values = tuple(Fraction(v) for v in values)
        if not self.values:
            raise ValueError("need at least one value")
        self.m = len(self.values) - 1

    def __repr__(self):
        return f"PiecewiseLinear(m={self.m})"


@dataclass(frozen=True)
class BranchingFunction(_Interpolating):
    T: int
    m: int
    values: tuple[Fraction, ...]
    counts: tuple[int, ...] = ()
    exact: bool = True
    # every stored value is a lower bound, within ``slack`` of the true one
    slack: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))
        if len(self.values) != self.m + 1:
            raise ValueError("need m + 1 values")

    @classmethod
    def from_values(cls, T: int, values: Sequence) -> "BranchingFunction":
        return cls(T, len(values) - 1, tuple(values))


def _log2_lower(c: int) -> tuple[Fraction, bool]:
    if c <= 0:
        raise ValueError("counts are positive")
    if c & (c - 1) == 0:
        return Fraction(c.bit_length() - 1), True
    scaled = math.floor((math.log2(c) - _LOG_MARGIN) * (1 << _LOG_BITS))
    return Fraction(scaled, 1 << _LOG_BITS), False


def _check_frame(P: DyadicSet, T: int, m: int) -> None:
    if T < 1 or m < 0:
        raise ValueError("need T >= 1 and m >= 0")
    if P.level != T * m:
        raise ValueError(f"set level {P.level} is not T*m = {T * m}")


def branching_function(P: DyadicSet, T: int, m: int) -> BranchingFunction:
    """``beta(j) = log2 |P|_{Delta**j} / T`` with ``Delta = 2**-T``."""
    _check_frame(P, T, m)
    counts = [len(P.cover(T * j)) for j in range(m + 1)]
    vals, exact = [], True
    for c in counts:
        lv, ex = _log2_lower(c)
        exact &= ex
        vals.append(lv / T)
    slack = Fraction(0) if exact else Fraction(2, (1 << _LOG_BITS) * T)
    return BranchingFunction(T, m, tuple(vals), tuple(counts), exact, slack)


def _children_counts(cells: np.ndarray, shift: int):
    parents, inv, counts = np.unique(cells >> shift, axis=0, return_inverse=True, return_counts=True)
    return parents, inv.reshape(-1), counts


def is_uniform(P: DyadicSet, T: int, m: int):
    """Return ``(uniform, (N_1, ..., N_m))``; ``N_j`` is ``None`` where it is not constant."""
    _check_frame(P, T, m)
    if len(P) == 0:
        return False, tuple(None for _ in range(m))
    ok, seq = True, []
    for j in range(1, m + 1):
        level_j = P.cells >> (T * (m - j))
        kids = np.unique(level_j, axis=0)
        _, _, counts = _children_counts(kids, T)
        if np.all(counts == counts[0]):
            seq.append(int(counts[0]))
        else:
            ok = False
            seq.append(None)
    return ok, tuple(seq)


def uniformization_loss_exponent(T: int) -> float:
    """``T**-1 log2(2T)``: the loss exponent a ``2**-T``-adic uniformization costs."""
    return math.log2(2 * T) / T


def uniformize(P: DyadicSet, T: int, m: int) -> DyadicSet:
    """A ``{Delta**j}``-uniform subset of ``P`` keeping at least ``(4T)**-m |P|`` cells.

    Works from the finest level up. At each level every surviving cell has
    the same mass below it, so parents are pigeonholed by child count into
    classes ``[2**i, 2**(i+1))``; the class keeping the most mass wins and each
    of its parents is trimmed to the class minimum, keeping the
    lexicographically smallest children.
    """
    _check_frame(P, T, m)
    if len(P) == 0 or m == 0:
        return P
    keep = np.ones(len(P), dtype=bool)
    for j in range(m, 0, -1):
        cells = P.cells[keep]
        idx = np.nonzero(keep)[0]
        kids, kid_inv = np.unique(cells >> (T * (m - j)), axis=0, return_inverse=True)
        kid_inv = kid_inv.reshape(-1)
        parents, par_inv, counts = _children_counts(kids, T)
        classes = np.array([int(c).bit_length() - 1 for c in counts])
        best_cls, best_mass, best_min = None, -1, 0
        for c in np.unique(classes):
            members = classes == c
            cmin = int(counts[members].min())
            mass = int(members.sum()) * cmin
            if mass > best_mass:
                best_cls, best_mass, best_min = c, mass, cmin
        # kids are in lexicographic order, so within a parent the first
        # ``best_min`` of them are the lexicographically smallest
        rank = np.zeros(len(kids), dtype=np.int64)
        seen: dict[int, int] = {}
        for i, p in enumerate(par_inv.tolist()):
            rank[i] = seen.get(p, 0)
            seen[p] = rank[i] + 1
        kid_ok = (classes[par_inv] == best_cls) & (rank < best_min)
        new_keep = np.zeros(len(P), dtype=bool)
        new_keep[idx[kid_ok[kid_inv]]] = True
        keep = new_keep
    return DyadicSet(P.cells[keep], P.level, P.dim)


def write_branching(f: PiecewiseLinear, T: int, fh) -> None:
    fh.write(f"{T} {f.m}\n")
    for v in f.values:
        fh.write(f"{v.numerator}/{v.denominator}\n")


def read_branching(fh) -> BranchingFunction:
    T, m = (int(v) for v in fh.readline().split())
    vals = [Fraction(fh.readline().strip()) for _ in range(m + 1)]
    return BranchingFunction(T, m, tuple(vals))
