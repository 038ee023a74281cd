from fractions import Fraction

import numpy as np
import pytest

from dyadlab import DyadicSet, frostman_constant, katz_tao_constant, project
from dyadlab.constructions import (
    CONSTRUCTIONS,
    evaluate_check,
    katz_tao_sharp_example,
    minimal_nonconc_example,
    product_example_large_alpha,
    product_example_small_alpha,
    standard_sharp_example,
)

half = Fraction(1, 2)


def test_standard_example_structure():
    ex = standard_sharp_example(6, half, 1)
    assert ex.ok
    A = ex.sets["A"]
    # gap rho**(1/2) = 1/8 at rho = 1/64
    assert A.cells[:, 0].tolist() == list(range(0, 64, 8))
    assert len(ex.P) == 64
    # Farey slopes of order floor(2**(3/2)) = 2
    assert ex.notes["Q"] == 2 and len(ex.theta) == 3
    assert ex.claimed_exponent == Fraction(3, 4)


def test_standard_example_projection_by_direct_count():
    ex = standard_sharp_example(8, half, 1)
    mx, cell = ex.max_projection()
    direct = max(project(ex.P, Fraction(int(i), 256)) for i in ex.theta.cells[:, 0])
    assert mx == direct
    # bound C rho**(-3/4) with C = 16
    assert mx <= 16 * 2**6


def test_strict_mode_names_nearest_scale():
    with pytest.raises(ValueError, match=r"2\*\*-6 or 2\*\*-8"):
        standard_sharp_example(7, half, 1, strict=True)
    ex = standard_sharp_example(7, half, 1)
    # the gap snaps toward the finer scale
    assert ex.snapped_scales["gap"] == 4


def test_standard_example_parameter_checks():
    with pytest.raises(ValueError):
        standard_sharp_example(6, half, Fraction(1, 4))
    with pytest.raises(ValueError):
        standard_sharp_example(6, 0, 1)


def test_minimal_nonconcentration_small():
    ex = minimal_nonconc_example(8, half, 1, half)
    assert ex.ok, [c for c in ex.claims if not c.passed]
    assert ex.snapped_scales["Delta"] == 4
    assert ex.P.level == 8


def test_minimal_nonconcentration_rejects_bad_u():
    with pytest.raises(ValueError):
        minimal_nonconc_example(8, half, Fraction(3, 2), 1)


def test_katz_tao_example():
    ex = katz_tao_sharp_example(8, 6, half, 1)
    assert ex.ok
    assert len(ex.P) == 64
    assert katz_tao_constant(ex.P, 1).best_constant <= 16
    assert frostman_constant(ex.theta, half).best_constant <= 16
    with pytest.raises(ValueError):
        katz_tao_sharp_example(6, 8, half, 1)


def test_product_small_alpha_feasible_instance():
    ex = product_example_small_alpha(16, half, Fraction(1, 4), 16, 4)
    assert ex.ok
    A, B = ex.factors
    assert len(A) == 16 and len(B) == 4


def test_product_small_alpha_rejects_oversized_A():
    # |A| = 32 > delta**-alpha = 2**(10/4)
    with pytest.raises(ValueError, match="delta"):
        product_example_small_alpha(10, half, Fraction(1, 4), 32, 4)
    with pytest.raises(ValueError, match="power of two"):
        product_example_small_alpha(16, half, Fraction(1, 4), 12, 4)


def test_product_large_alpha():
    ex = product_example_large_alpha(12, Fraction(1, 4), half, 16, 8)
    assert ex.ok
    assert ex.notes["abc_K"] < 4


def test_manifest_is_json_ready():
    import json

    ex = standard_sharp_example(6, half, 1)
    man = json.loads(json.dumps(ex.manifest()))
    assert man["construction"] == "standard"
    assert len(man["checks"]) == len(man["verified_caps"])
    assert all(c["passed"] for c in man["verified_caps"])


def test_evaluate_check_kinds():
    S = DyadicSet([0, 4, 8, 12], 4, 1)
    sets = {"S": S}
    assert evaluate_check({"kind": "exact_cardinality", "set": "S", "value": 4}, sets).passed
    assert evaluate_check({"kind": "cardinality", "set": "S", "target_log2": 2, "cap": 1}, sets).passed
    assert evaluate_check({"kind": "separation", "set": "S", "sep_log2": 2}, sets).passed
    assert not evaluate_check({"kind": "separation", "set": "S", "sep_log2": 1}, sets).passed
    assert evaluate_check({"kind": "frostman", "set": "S", "s": half, "cap": 2}, sets).passed


def test_caps_override_is_respected():
    ex = standard_sharp_example(6, half, 1, caps={"projection": Fraction(1, 2)})
    assert not ex.ok
    failed = [c.name for c in ex.claims if not c.passed]
    assert failed == ["projection <= C rho**(-(s+t)/2)"]


def test_constructions_are_deterministic():
    for name, args in [("standard", (6, half, 1)), ("katz_tao", (8, 5, half, 1))]:
        a, b = CONSTRUCTIONS[name](*args), CONSTRUCTIONS[name](*args)
        assert all(np.array_equal(a.sets[k].cells, b.sets[k].cells) for k in a.sets)
