"""Geometry metrics for cellular localization under Poisson deployments.

The library centers on the maximum angular separation of the hearable base
stations, its closed-form distributions, and a reproducible Monte Carlo
engine relating it to the geometric dilution of precision.
"""

from .analytic import (
    WeightedCdf,
    expected_bs_for_target,
    expected_bs_stopping_oracle,
    stevens_cdf,
    weighted_cdf,
)
from .geometry import (
    AngleSet,
    DegenerateInputError,
    GeometryRecord,
    HullMembership,
    InsufficientGeometryError,
    compute_angle_set,
    crlb_from_gdop,
    gdop_bound,
    gdop_tdoa,
    gdop_toa_anglesum,
    gdop_toa_matrix,
    geometry_record_from_points,
    inside_convex_hull,
    psi_max,
)
from .kernels import active_backend, compiled_available, run_block
from .network import (
    HearabilityTable,
    NetworkParams,
    Scenario,
    empirical_hearability,
    hearable_set,
    sample_scenario,
    shadowing_transformed_density,
    sinr,
)
from .stats import (
    DistributionTable,
    UndefinedCorrelationError,
    ecdf,
    ks_distance,
    pearson_r,
    spearman_rho,
)

__version__ = "0.1.0"
