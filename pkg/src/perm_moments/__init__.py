"""Averages of randomized class functions on symmetric and Weyl groups.

Four mutually checking computation routes: exact partition sums, generating
function coefficient extraction, Feller-coupling Monte Carlo, and closed-form
asymptotics.
"""

from .angles import (
    AtomMixture,
    DiracOne,
    MomentTable,
    RootsOfUnityConjugate,
    UniformConjugate,
    moments_of,
)
from .asymptotics import (
    AsymptoticResult,
    Regime,
    asymptotic_expect,
    asymptotic_ratio_table,
    binomial_growth_ratio,
    complex_binomial,
    complex_gamma,
    limit_product_mean,
)
from .classfun import (
    CoeffGrid,
    EvalPoint,
    GridKind,
    Randomization,
    assoc_class_value,
    char_poly_grid,
    det_average_per_point,
    derivative_moment_fd,
    expect_bruteforce_sn,
    expect_exact,
    expect_gf,
    folded_grid,
    geometric_grid,
    gf_report,
    grid_product,
    one_minus_x,
)
from .errors import (
    DomainError,
    OrderError,
    PermMomentsError,
    PoleError,
    SizeLimitError,
    TruncationError,
)
from .estimate import MCEstimate
from .feller import (
    FellerSample,
    XiSequence,
    bits_to_cycle_type,
    coupling_stats,
    cycle_type_to_bits,
    empirical_cycle_type_law,
    excess_event,
    mc_expect_per_cycle,
    mc_limit_product_mean,
    sample_limit_product,
    sample_xi,
    spacings,
    total_spacings,
)
from .groups import (
    GroupKind,
    brute_force_group,
    expect_an_exact,
    expect_group_gf,
    signed_expect_exact,
    signed_expect_gf,
)
from .partitions import (
    CycleCounts,
    Partition,
    centralizer_order,
    class_weight,
    cycle_counts,
    enumerate_partitions,
    iter_partitions,
    signature,
)

__all__ = [name for name in dir() if not name.startswith("_")]
