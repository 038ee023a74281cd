import random
from fractions import Fraction

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from dyadlab import DyadicSet, frostman_constant
from dyadlab.estimators import LipschitzDecomposer, NonConcentrationProfiler, Uniformizer
from dyadlab.multiscale import is_uniform

from test_branching import random_tree


def test_uniformizer_filters_to_uniform_rows():
    P = random_tree(random.Random(2), 3, 2)
    X = P.cells[::-1]
    est = Uniformizer(T=3, m=2)
    Y = est.fit_transform(X)
    assert is_uniform(DyadicSet(Y, 6), 3, 2)[0]
    assert len(Y) == len(est.subset_)
    assert est.retained_fraction_ == Fraction(len(Y), len(P))
    assert est.get_params() == {"T": 3, "m": 2}


def test_decomposer_majorant():
    vals = [0] * 11 + [2 * j for j in range(1, 11)]
    est = LipschitzDecomposer(xi=Fraction(1, 10)).fit(vals)
    assert est.slopes_ == (0, 2)
    out = est.transform([0, 10, 20])
    assert list(out) == [0, 0, 20]


def test_profiler_matches_function():
    X = np.array([[x, y] for x in range(0, 16, 4) for y in range(16)])
    est = NonConcentrationProfiler(s=Fraction(1, 2), level=4).fit(X)
    assert est.constant_ == frostman_constant(DyadicSet(X, 4), Fraction(1, 2)).best_constant
    assert est.score() == pytest.approx(-est.constant_.log2())
    assert clone(est).get_params()["level"] == 4
    with pytest.raises(ValueError):
        NonConcentrationProfiler(kind="bogus").fit(X)


def test_unfitted_raises():
    with pytest.raises(NotFittedError):
        LipschitzDecomposer().transform([0])
