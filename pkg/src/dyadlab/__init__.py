"""Exact dyadic toolkit for discretised Furstenberg sets and projections."""

from .dyadic import (
    DyadicInterval,
    DyadicSet,
    DyadicSquare,
    covering_number,
    neighborhood,
    refine,
    renormalize,
    resolve_level,
    scale_set,
)
from .exact import PowerValue
from .statistics import (
    check_single_scale_nonconcentration,
    frostman_constant,
    katz_tao_constant,
    validate_configuration,
)
from .tubes import (
    DyadicTube,
    NiceConfiguration,
    build_configuration,
    incidence,
    measure_incidences,
    project,
    tubes_through,
)

__version__ = "0.1.0"
