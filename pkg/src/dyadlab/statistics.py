"""Frostman and Katz-Tao non-concentration constants, computed exactly."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dyadic import DyadicSet
from .exact import PowerValue

__all__ = [
    "LevelMax",
    "NonConcentrationReport",
    "level_counts",
    "frostman_constant",
    "katz_tao_constant",
    "check_single_scale_nonconcentration",
    "single_scale_level",
    "ConfigurationReport",
    "validate_configuration",
]


@dataclass(frozen=True)
class LevelMax:
    level: int
    count: int
    cell: tuple[int, ...]
    ratio: PowerValue


@dataclass
class NonConcentrationReport:
    kind: str
    s: Fraction
    n_points: int
    set_level: int
    best_constant: PowerValue
    witness_level: int
    witness_cell: tuple[int, ...]
    per_level: list[LevelMax] = field(default_factory=list)

    def holds(self, C) -> bool:
        """True when the set is a ``(delta, s, C)``-set of this kind."""
        return self.best_constant <= C

    def to_json(self) -> dict:
        c = self.best_constant
        cell = list(self.witness_cell) + [0] * (2 - len(self.witness_cell))
        return {
            "kind": self.kind,
            "s": str(self.s),
            # constant = constant_num / constant_den * 2**constant_exp
            "constant_num": c.coef.numerator,
            "constant_den": c.coef.denominator,
            "constant_exp": str(c.exp),
            "constant_approx": float(c),
            "witness_level": self.witness_level,
            "witness_ix": cell[0],
            "witness_iy": cell[1],
            "per_level": [
                {"level": m.level, "count": m.count, "ratio": float(m.ratio)}
                for m in self.per_level
            ],
        }


def level_counts(P: DyadicSet):
    """Yield ``(level, cells, counts)`` from ``P.level`` up to level 0.

    Each level is aggregated from the one below, so the whole scan costs
    ``O(|P| * levels)``.
    """
    cells = P.cells
    counts = np.ones(len(cells), dtype=np.int64)
    for j in range(P.level, -1, -1):
        yield j, cells, counts
        if j == 0:
            break
        parents = cells >> 1
        uniq, inv = np.unique(parents, axis=0, return_inverse=True)
        counts = np.bincount(inv.reshape(-1), weights=counts, minlength=len(uniq)).astype(np.int64)
        cells = uniq


def _scan(P: DyadicSet, s, kind: str) -> NonConcentrationReport:
    if len(P) == 0:
        raise ValueError("non-concentration constants need a non-empty set")
    s = Fraction(s)
    n = len(P)
    k = P.level
    table = []
    for j, cells, counts in level_counts(P):
        i = int(np.argmax(counts))
        cnt = int(counts[i])
        if kind == "frostman":
            # |P & Q| / (r**s |P|),  r = 2**-j
            ratio = PowerValue(Fraction(cnt, n), j * s)
        else:
            # |P & Q| / (r / delta)**s
            ratio = PowerValue(cnt, -(k - j) * s)
        table.append(LevelMax(j, cnt, tuple(int(v) for v in cells[i]), ratio))
    table.sort(key=lambda m: m.level)
    best = table[0]
    for m in table[1:]:
        if m.ratio > best.ratio:
            best = m
    return NonConcentrationReport(
        kind=kind,
        s=s,
        n_points=n,
        set_level=k,
        best_constant=best.ratio,
        witness_level=best.level,
        witness_cell=best.cell,
        per_level=table,
    )


def frostman_constant(P: DyadicSet, s) -> NonConcentrationReport:
    """Smallest ``C`` with ``|P & Q| <= C r**s |P|`` for every dyadic ``r``-cell, ``delta <= r <= 1``."""
    return _scan(P, s, "frostman")


def katz_tao_constant(P: DyadicSet, s) -> NonConcentrationReport:
    """Smallest ``C`` with ``|P & Q| <= C (r/delta)**s`` for every dyadic ``r``-cell."""
    return _scan(P, s, "katz_tao")


def count_in_cell(P: DyadicSet, level: int, cell) -> int:
    shift = P.level - level
    return int(np.sum(np.all((P.cells >> shift) == np.asarray(cell), axis=1)))


def single_scale_level(P: DyadicSet) -> int:
    """Level of the dyadic scale ``delta * |P|**(1/2)`` (rounded to the next finer dyadic)."""
    n = len(P)
    if n == 0:
        raise ValueError("empty set")
    # largest h with 4**h <= n, i.e. 2**h <= sqrt(n)
    h = (n.bit_length() - 1) // 2
    return max(0, P.level - h)


def check_single_scale_nonconcentration(P: DyadicSet, u):
    """Test ``|P & Q| <= delta**u |P|`` on every cell ``Q`` of side ``delta |P|**(1/2)``.

    Returns ``(ok, cell, count)`` where ``cell`` is the fullest cell.
    """
    u = Fraction(u)
    j = single_scale_level(P)
    cells, counts = np.unique(P.cells >> (P.level - j), axis=0, return_counts=True)
    i = int(np.argmax(counts))
    cnt = int(counts[i])
    # cnt <= 2**(-k u) * n
    ok = PowerValue(cnt) <= PowerValue(len(P), -P.level * u)
    return ok, (j,) + tuple(int(v) for v in cells[i]), cnt


def worst_slope_frostman(incidences, level: int, s) -> PowerValue:
    """Largest Frostman constant among the slope sets ``sigma(T(p))``."""
    worst = None
    cache: dict[bytes, PowerValue] = {}
    for ts in incidences.values():
        slopes = DyadicSet([[t.ia] for t in ts], level, 1)
        key = slopes.cells.tobytes()
        if key not in cache:
            cache[key] = frostman_constant(slopes, s).best_constant
        if worst is None or cache[key] > worst:
            worst = cache[key]
    return worst


@dataclass
class ConfigurationReport:
    valid: bool
    minimal_C: PowerValue | None
    stored_C: PowerValue | None
    M: int
    min_incidence: int
    max_incidence: int
    worst_frostman: PowerValue | None
    stored_ok: bool
    reason: str = ""


def validate_configuration(cfg) -> ConfigurationReport:
    """Recompute every incidence of a nice configuration and the least ``C`` it supports.

    Incidences are recomputed from ``cfg.points`` and ``cfg.tubes`` with the
    exact predicate; the stored incidence map is not trusted.
    """
    from .tubes import compute_incidences

    inc = compute_incidences(cfg.points, cfg.tubes, cfg.level)
    counts = [len(v) for v in inc.values()]
    M = int(cfg.M)
    lo, hi = min(counts, default=0), max(counts, default=0)
    if lo == 0 or M <= 0:
        return ConfigurationReport(False, None, cfg.C, M, lo, hi, None, False,
                                   "square with no incident tubes")
    worst = worst_slope_frostman(inc, cfg.level, cfg.s)
    minimal = max(PowerValue(Fraction(hi, M)), PowerValue(Fraction(M, lo)), worst)
    stored_ok = cfg.C is not None and minimal <= cfg.C
    return ConfigurationReport(True, minimal, cfg.C, M, lo, hi, worst, stored_ok)
