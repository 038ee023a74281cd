"""Sharpness constructions and arithmetic-progression machinery."""

from .examples import (
    CONSTRUCTIONS,
    DEFAULT_CAPS,
    Claim,
    SharpExample,
    evaluate_check,
    katz_tao_sharp_example,
    minimal_nonconc_example,
    product_example_large_alpha,
    product_example_small_alpha,
    standard_sharp_example,
)
from .progressions import (
    ABCWitness,
    RatioCoverReport,
    abc_ratio_construction,
    ap_set,
    dirichlet_approx,
    dirichlet_approx_many,
    farey_fractions,
    farey_slopes,
    ratio_set_covering,
)

__all__ = [
    "ABCWitness",
    "CONSTRUCTIONS",
    "Claim",
    "DEFAULT_CAPS",
    "RatioCoverReport",
    "SharpExample",
    "abc_ratio_construction",
    "ap_set",
    "dirichlet_approx",
    "dirichlet_approx_many",
    "evaluate_check",
    "farey_fractions",
    "farey_slopes",
    "katz_tao_sharp_example",
    "minimal_nonconc_example",
    "product_example_large_alpha",
    "product_example_small_alpha",
    "ratio_set_covering",
    "standard_sharp_example",
]
