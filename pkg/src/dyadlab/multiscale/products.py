"""Empirical check of the multiscale product inequality for ``|T| / M``."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..dyadic import resolve_level
from ..tubes import incident_pairs

__all__ = ["BlockReport", "ProductReport", "multiscale_product_check"]


@dataclass
class BlockReport:
    coarse_level: int
    fine_level: int
    n_cells: int
    max_ratio: Fraction
    worst_cell: tuple[int, int]


@dataclass
class ProductReport:
    levels: tuple[int, ...]
    global_ratio: Fraction
    blocks: list[BlockReport] = field(default_factory=list)

    @property
    def product(self) -> Fraction:
        out = Fraction(1)
        for b in self.blocks:
            out *= b.max_ratio
        return out

    @property
    def ratio(self) -> Fraction:
        """``(|T| / M)`` divided by the product of the per-block maxima."""
        return self.global_ratio / self.product

    def to_json(self) -> dict:
        return {
            "levels": list(self.levels),
            "global_ratio": float(self.global_ratio),
            "block_max_ratios": [float(b.max_ratio) for b in self.blocks],
            "ratio": float(self.ratio),
        }


def _renormalized_tubes(tubes: np.ndarray, px: int, py: int, k: int, kj: int, e: int) -> np.ndarray:
    """Tubes blown up by the level-``kj`` cell ``(px, py)`` and coarsened to level ``e``."""
    ia, ib = tubes[:, 0], tubes[:, 1]
    # y = a x + b in the cell's coordinates has slope a and intercept a px + b 2**kj - py
    shift = k - e
    b_new = ((ia * px + (ib << kj)) >> shift) - (py << e)
    a_new = ia >> shift
    return np.unique(np.stack([a_new, b_new], axis=1), axis=0)


def multiscale_product_check(cfg, scales) -> ProductReport:
    """Compare ``|T|/M`` against the product of per-block ``|T_p|/M_p`` maxima.

    ``scales`` runs from 1 down to ``delta`` (levels or dyadic scales). For each
    block ``[k_j, k_{j+1}]`` and each cell ``p`` of level ``k_j`` met by the
    points, the points inside ``p`` are covered at level ``k_{j+1}`` and blown
    up, and the tubes meeting ``p`` are rescaled the same way. The rescaling
    is the naive one; it does not rebuild the refined tube families.
    """
    levels = tuple(resolve_level(r) for r in scales)
    k = cfg.level
    if levels[0] != 0 or levels[-1] != k or any(a >= b for a, b in zip(levels, levels[1:])):
        raise ValueError("scales must decrease strictly from 1 to delta")
    cells = cfg.points.cells
    tubes = np.array([[t.ia, t.ib] for t in cfg.tubes], dtype=np.int64).reshape(-1, 2)
    pi, ti = incident_pairs(cells, tubes, k)
    counts = np.bincount(pi, minlength=len(cells))
    M = max(1, int(counts.min()))
    report = ProductReport(levels, Fraction(len(tubes), M))

    for kj, kn in zip(levels, levels[1:]):
        e = kn - kj
        coarse = cells >> (k - kj)
        keys, inv = np.unique(coarse, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        best, best_cell = None, (0, 0)
        for c, (px, py) in enumerate(keys.tolist()):
            inside = inv == c
            pts = np.unique((cells[inside] >> (k - kn)) - (np.array([px, py]) << e), axis=0)
            hit_tubes = np.unique(ti[inside[pi]])
            local = _renormalized_tubes(tubes[hit_tubes], px, py, k, kj, e)
            lp, _ = incident_pairs(pts, local, e)
            lc = np.bincount(lp, minlength=len(pts))
            ratio = Fraction(len(local), max(1, int(lc.min())))
            if best is None or ratio > best:
                best, best_cell = ratio, (px, py)
        report.blocks.append(BlockReport(kj, kn, len(keys), best, best_cell))
    return report
