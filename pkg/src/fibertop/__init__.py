"""Executable fiberwise normality theory on finite topological spaces.

Spaces are validated open-set families on bitmask point sets; maps carry
their continuity proof; every normality class of a map (prenormal, normal,
sigma variants, perfect and the co-perfect pair) is decided exactly with
machine-checkable witnesses, and the separating-function and extension
constructions are executable with certified error bounds.
"""

from .config import RunConfig
from .oscillation import (
    RationalFunction,
    is_f_continuous_at,
    is_f_equicontinuous_at,
    norm,
    osc_at_point,
    osc_on_set,
    weighted_sum,
)
from .partitions import (
    ApproximateLimitFunction,
    ConsistentBinaryFamily,
    Level,
    RegularKPartition,
    assemble_limit,
    interiors_cover_check,
    stepwise_function,
    validate_consistent_family,
    validate_regular_partition,
)
from .normality import (
    are_f_separated,
    build_binary_partitions,
    build_binary_partitions_sigma,
    is_co_perfectly_normal,
    is_co_sigma_perfectly_normal,
    is_f_functionally_closed,
    is_f_functionally_open,
    is_hereditarily_normal,
    is_normal,
    is_perfectly_normal,
    is_prenormal,
    is_sigma_normal,
    is_sigma_prenormal,
    small_urysohn_search,
)
from .spaces import (
    FiberedMap,
    FiniteSpace,
    Submapping,
    Subspace,
    closure,
    interior,
    is_f_sigma_submapping,
    is_f_sigma_subset,
    minimal_open_neighborhood,
    restrict_map,
    validate_topology,
)
from .urysohn_tietze import (
    build_separator,
    exact_extension_exists,
    separation_from_extension,
    sigma_separator_family,
    tietze_extend,
    verify_condition_C,
    verify_condition_D,
)
from .harness import classify, equivalence_harness, run_theorem_sweep

__all__ = [name for name in dir() if not name.startswith("_")]
