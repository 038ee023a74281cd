"""Multiscale analysis: branching functions, decompositions and exponent bookkeeping."""

from .branching import (
    BranchingFunction,
    PiecewiseLinear,
    branching_function,
    is_uniform,
    read_branching,
    uniformization_loss_exponent,
    uniformize,
    write_branching,
)
from .decomposition import (
    AffineMajorant,
    Decomposition,
    DecompositionError,
    IndexClassification,
    affine_majorant,
    classify,
    decompose,
    default_tau,
    sigma_star,
    superlinear_check,
)
from .exponents import (
    BookkeepingResult,
    ParameterBudget,
    ProductBound,
    furstenberg_exponent,
    general_product_exponent,
    katz_tao_bookkeeping,
    product_exponent,
    projection_bookkeeping,
)
from .products import ProductReport, multiscale_product_check

__all__ = [
    "AffineMajorant",
    "BookkeepingResult",
    "BranchingFunction",
    "Decomposition",
    "DecompositionError",
    "IndexClassification",
    "ParameterBudget",
    "PiecewiseLinear",
    "ProductReport",
    "ProductBound",
    "affine_majorant",
    "branching_function",
    "classify",
    "decompose",
    "default_tau",
    "furstenberg_exponent",
    "general_product_exponent",
    "is_uniform",
    "multiscale_product_check",
    "read_branching",
    "sigma_star",
    "superlinear_check",
    "katz_tao_bookkeeping",
    "product_exponent",
    "projection_bookkeeping",
    "uniformization_loss_exponent",
    "uniformize",
    "write_branching",
]
