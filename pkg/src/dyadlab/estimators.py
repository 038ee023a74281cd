"""scikit-learn style wrappers.

The analysis is exact and single-shot, so only ``fit`` does real work.
``transform`` filters by, or evaluates, what ``fit`` found; none of these
estimators generalise to new samples.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .dyadic import DyadicSet
from .multiscale import affine_majorant, decompose, is_uniform, uniformize
from .statistics import frostman_constant, katz_tao_constant

__all__ = ["Uniformizer", "LipschitzDecomposer", "NonConcentrationProfiler"]


def _cells(X, level: int) -> DyadicSet:
    X = np.asarray(X, dtype=np.int64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[1] not in (1, 2):
        raise ValueError("X must hold one row of integer cell indices per cell")
    return DyadicSet(X, level, X.shape[1])


def _values(X) -> list[Fraction]:
    v = np.asarray(X, dtype=object).reshape(-1)
    return [Fraction(x) for x in v]


class Uniformizer(TransformerMixin, BaseEstimator):
    """Select a ``{2**-(T j)}``-uniform subset of a cell array at level ``T m``."""

    def __init__(self, T: int = 4, m: int = 2):
        self.T = T
        self.m = m

    def fit(self, X, y=None):
        P = _cells(X, self.T * self.m)
        self.subset_ = uniformize(P, self.T, self.m)
        _, self.branching_counts_ = is_uniform(self.subset_, self.T, self.m)
        self.retained_fraction_ = Fraction(len(self.subset_), max(len(P), 1))
        self.n_features_in_ = P.dim
        return self

    def transform(self, X):
        """Rows of ``X`` that belong to the fitted subset, in their original order."""
        check_is_fitted(self, "subset_")
        P = _cells(X, self.T * self.m)
        keep = np.array([tuple(row) in self.subset_ for row in P.cells.tolist()], dtype=bool)
        return P.cells[keep]


class LipschitzDecomposer(TransformerMixin, BaseEstimator):
    """Certified superlinear decomposition of ``f`` sampled at ``0..m``.

    ``fit`` takes the values ``f(0), .., f(m)``; ``transform`` evaluates the
    convex majorant at the given points.
    """

    def __init__(self, d=2, xi=Fraction(1, 10), tau=None):
        self.d = d
        self.xi = xi
        self.tau = tau

    def fit(self, X, y=None):
        values = _values(X)
        self.decomposition_ = decompose(values, self.d, self.xi, self.tau)
        self.majorant_ = affine_majorant(self.decomposition_, values)
        self.breakpoints_ = self.decomposition_.breakpoints
        self.slopes_ = self.decomposition_.slopes
        return self

    def transform(self, X):
        check_is_fitted(self, "majorant_")
        x = np.asarray(X, dtype=object).reshape(-1)
        return np.array([self.majorant_(v) for v in x], dtype=object)


class NonConcentrationProfiler(BaseEstimator):
    """Best Frostman or Katz-Tao constant of a cell array at a fixed level."""

    def __init__(self, s=Fraction(1, 2), level: int = 8, kind: str = "frostman"):
        self.s = s
        self.level = level
        self.kind = kind

    def fit(self, X, y=None):
        scan = {"frostman": frostman_constant, "katz_tao": katz_tao_constant}.get(self.kind)
        if scan is None:
            raise ValueError("kind must be 'frostman' or 'katz_tao'")
        self.report_ = scan(_cells(X, self.level), Fraction(self.s))
        self.constant_ = self.report_.best_constant
        return self

    def score(self, X=None, y=None) -> float:
        """Minus ``log2`` of the constant, so a less concentrated set scores higher."""
        check_is_fitted(self, "constant_")
        return -float(self.constant_.log2())
