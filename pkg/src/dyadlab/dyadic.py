"""Exact dyadic grid arithmetic.

A cell at level ``k`` with integer index ``i`` is the half-open interval
``[i * 2**-k, (i + 1) * 2**-k)``; squares are products of two such cells.
All geometry is done on integer indices, so nothing here ever rounds.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Sequence, TextIO

import numpy as np

__all__ = [
    "DyadicInterval",
    "DyadicSquare",
    "DyadicSet",
    "resolve_level",
    "dyadic_exponent",
    "covering_number",
    "renormalize",
    "scale_set",
    "neighborhood",
    "refine",
    "read_set",
    "write_set",
]


def dyadic_exponent(value) -> int:
    """Return ``e`` with ``value == 2**-e``; raise if ``value`` is not a power of two."""
    v = Fraction(value)
    if v <= 0:
        raise ValueError(f"dyadic scale must be positive, got {v}")
    num, den = v.numerator, v.denominator
    if num == 1 and den & (den - 1) == 0:
        return den.bit_length() - 1
    if den == 1 and num & (num - 1) == 0:
        return -(num.bit_length() - 1)
    raise ValueError(f"{v} is not a power of two")


def resolve_level(r) -> int:
    """Level of the largest dyadic scale ``2**-n <= r`` (``n >= 0``).

    Integers are taken to be levels already; anything else is a scale.
    """
    if isinstance(r, (int, np.integer)) and not isinstance(r, bool):
        if r < 0:
            raise ValueError("levels are non-negative")
        return int(r)
    v = Fraction(r)
    if v <= 0:
        raise ValueError(f"scale must be positive, got {v}")
    if v >= 1:
        return 0
    p, q = v.numerator, v.denominator
    n = max(0, (q // p).bit_length() - 1)
    while (p << n) < q:
        n += 1
    while n > 0 and (p << (n - 1)) >= q:
        n -= 1
    return n


class DyadicInterval(NamedTuple):
    level: int
    i: int

    @property
    def side(self) -> Fraction:
        return Fraction(1, 1 << self.level)

    def bounds(self) -> tuple[Fraction, Fraction]:
        return self.i * self.side, (self.i + 1) * self.side

    def ancestor(self, level: int) -> "DyadicInterval":
        return DyadicInterval(level, self.i >> (self.level - level))

    def contains(self, other: "DyadicInterval") -> bool:
        return other.level >= self.level and other.ancestor(self.level) == self

    @property
    def index(self) -> tuple[int]:
        return (self.i,)


class DyadicSquare(NamedTuple):
    level: int
    ix: int
    iy: int

    @property
    def side(self) -> Fraction:
        return Fraction(1, 1 << self.level)

    def bounds(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        """``(x0, x1, y0, y1)``; the square is ``[x0, x1) x [y0, y1)``."""
        d = self.side
        return self.ix * d, (self.ix + 1) * d, self.iy * d, (self.iy + 1) * d

    def ancestor(self, level: int) -> "DyadicSquare":
        shift = self.level - level
        return DyadicSquare(level, self.ix >> shift, self.iy >> shift)

    def contains(self, other: "DyadicSquare") -> bool:
        return other.level >= self.level and other.ancestor(self.level) == self

    @property
    def index(self) -> tuple[int, int]:
        return (self.ix, self.iy)


def _cell(level: int, idx: Sequence[int]):
    if len(idx) == 1:
        return DyadicInterval(level, int(idx[0]))
    return DyadicSquare(level, int(idx[0]), int(idx[1]))


class DyadicSet:
    """Deduplicated family of dyadic cells sharing one level.

    ``cells`` is an ``(n, dim)`` integer array kept in lexicographic order.
    """

    __slots__ = ("cells", "level", "dim")

    def __init__(self, cells, level: int, dim: int | None = None):
        arr = np.asarray(cells, dtype=np.int64)
        if arr.size == 0:
            if dim is None:
                dim = arr.shape[1] if arr.ndim == 2 else 1
            arr = np.zeros((0, dim), dtype=np.int64)
        else:
            if arr.ndim == 1:
                arr = arr.reshape(-1, 1) if dim in (None, 1) else arr.reshape(-1, dim)
            arr = np.unique(arr, axis=0)
        if dim is not None and arr.shape[1] != dim:
            raise ValueError(f"expected {dim}-dimensional cells, got {arr.shape[1]}")
        if arr.shape[1] not in (1, 2):
            raise ValueError("only 1-D and 2-D sets are supported")
        if level < 0:
            raise ValueError("level must be non-negative")
        arr.setflags(write=False)
        self.cells = arr
        self.level = int(level)
        self.dim = int(arr.shape[1])

    @classmethod
    def from_cells(cls, cells: Iterable, level: int | None = None, dim: int | None = None):
        """Build from ``DyadicSquare``/``DyadicInterval`` objects or plain index tuples."""
        rows = []
        for c in cells:
            if isinstance(c, (DyadicSquare, DyadicInterval)):
                if level is None:
                    level = c.level
                elif c.level != level:
                    raise ValueError("cells must share a common level")
                rows.append(c.index)
            else:
                rows.append(tuple(c) if np.ndim(c) else (c,))
        if level is None:
            raise ValueError("level is required for an empty or index-only set")
        return cls(rows, level, dim)

    @classmethod
    def full_grid(cls, level: int, dim: int = 2) -> "DyadicSet":
        n = 1 << level
        axes = [np.arange(n, dtype=np.int64)] * dim
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
        return cls(grid, level, dim)

    @property
    def scale(self) -> Fraction:
        return Fraction(1, 1 << self.level)

    def __len__(self) -> int:
        return int(self.cells.shape[0])

    def __iter__(self) -> Iterator:
        for row in self.cells.tolist():
            yield _cell(self.level, row)

    def __contains__(self, cell) -> bool:
        if isinstance(cell, (DyadicInterval, DyadicSquare)):
            if cell.level != self.level:
                return False
            idx = cell.index
        else:
            idx = tuple(np.atleast_1d(cell))
        return bool(np.any(np.all(self.cells == np.asarray(idx), axis=1)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DyadicSet):
            return NotImplemented
        return (
            self.level == other.level
            and self.dim == other.dim
            and np.array_equal(self.cells, other.cells)
        )

    def __hash__(self) -> int:
        return hash((self.level, self.dim, self.cells.tobytes()))

    def __repr__(self) -> str:
        return f"DyadicSet(dim={self.dim}, level={self.level}, n={len(self)})"

    def tuples(self) -> list[tuple[int, ...]]:
        return [tuple(r) for r in self.cells.tolist()]

    def union(self, other: "DyadicSet") -> "DyadicSet":
        _same_frame(self, other)
        return DyadicSet(np.vstack([self.cells, other.cells]), self.level, self.dim)

    def cover(self, level) -> "DyadicSet":
        """The coarser cells at ``level`` meeting the union of this set."""
        j = resolve_level(level)
        if j > self.level:
            raise ValueError(
                f"cannot cover at level {j}: finer than the set's level {self.level}"
            )
        return DyadicSet(self.cells >> (self.level - j), j, self.dim)


def _same_frame(a: DyadicSet, b: DyadicSet) -> None:
    if a.level != b.level or a.dim != b.dim:
        raise ValueError("sets live at different levels or dimensions")


def covering_number(S: DyadicSet, r) -> int:
    """Number of dyadic ``r``-cells meeting the union of ``S``.

    ``r`` is either a level (int) or a scale; non-dyadic scales resolve to
    the next finer dyadic scale.
    """
    return len(S.cover(r))


def renormalize(P: DyadicSet, p: DyadicSquare | DyadicInterval) -> DyadicSet:
    """Blow the cell ``p`` up to the unit cell and return the image of ``P`` inside it."""
    if P.dim != len(p.index):
        raise ValueError("dimension mismatch between set and cell")
    if p.level > P.level:
        raise ValueError("the renormalizing cell must be coarser than the set")
    shift = P.level - p.level
    base = np.asarray(p.index, dtype=np.int64)
    inside = np.all((P.cells >> shift) == base, axis=1)
    return DyadicSet(P.cells[inside] - (base << shift), shift, P.dim)


def scale_set(P: DyadicSet, factor) -> DyadicSet:
    """Multiply every cell of ``P`` by the dyadic ``factor``."""
    e = dyadic_exponent(factor)
    if P.level + e < 0:
        raise ValueError("scaled cells would be coarser than the unit scale")
    return DyadicSet(P.cells, P.level + e, P.dim)


def refine(P: DyadicSet, level) -> DyadicSet:
    """Same union, re-expressed with the finer cells at ``level``."""
    j = resolve_level(level)
    if j < P.level:
        raise ValueError("refine needs a finer level")
    shift = j - P.level
    k = 1 << shift
    offs = np.array(list(itertools.product(range(k), repeat=P.dim)), dtype=np.int64)
    out = ((P.cells << shift)[:, None, :] + offs[None, :, :]).reshape(-1, P.dim)
    return DyadicSet(out, j, P.dim)


def neighborhood(S: DyadicSet, r) -> DyadicSet:
    """Cells at ``S.level`` whose index lies within ``r / S.scale`` of a cell of ``S``.

    Distances are sup-norm on indices; for ``S = {[1/2, 5/8)}`` and ``r = 1/4``
    this is ``[1/4, 7/8)``.
    """
    j = resolve_level(r)
    if j > S.level:
        raise ValueError("neighbourhood radius must be at least the set's scale")
    if len(S) == 0:
        return S
    R = 1 << (S.level - j)
    span = np.arange(-R, R + 1, dtype=np.int64)
    offs = np.array(list(itertools.product(span, repeat=S.dim)), dtype=np.int64)
    out = (S.cells[:, None, :] + offs[None, :, :]).reshape(-1, S.dim)
    return DyadicSet(out, S.level, S.dim)


def write_set(S: DyadicSet, fh: TextIO) -> None:
    fh.write(f"{S.dim} {S.level} {len(S)}\n")
    for row in S.cells.tolist():
        fh.write(" ".join(str(v) for v in row) + "\n")


def read_set(fh: TextIO) -> DyadicSet:
    header = fh.readline().split()
    if len(header) != 3:
        raise ValueError("set file header must be 'dim k n'")
    dim, level, n = (int(v) for v in header)
    rows = []
    for _ in range(n):
        parts = fh.readline().split()
        if len(parts) != dim:
            raise ValueError(f"expected {dim} coordinates per line")
        rows.append([int(v) for v in parts])
    return DyadicSet(rows, level, dim)
