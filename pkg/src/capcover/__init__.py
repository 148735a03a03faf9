"""Numerical laboratory for partial coverings of the unit sphere by geodesic caps.

Construct cap configurations (random, antipodal, explicit), estimate the
mass of their union by Monte Carlo or exactly on the circle, evaluate the
closed-form two-sided bounds for the maximal covered fraction, verify the
Gaussian-geometry facts behind those bounds, and probe optimality with a
derivative-free local search.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    EulerBracket,
    TheoremInputs,
    alpha_correction,
    beta_lower,
    cone_term,
    efr_reference,
    euler_report,
    ldiv_upper_constant,
    sidak_product_bound,
    theorem_bounds,
    threshold_caps,
    zone_bound,
)
from .caps import (
    Cap,
    ConeGeometry,
    ball_volume_log,
    cap_from_mass,
    cap_from_radius,
    cap_mass_from_radius,
    cone_geometry,
    eta_bound,
    gaussian_halfspace_offset,
    mass_upper_limit,
    radius_from_mass,
)
from .coverage import (
    CoverageEstimate,
    exact_coverage_circle,
    expected_random_coverage,
    mc_coverage,
    mean_coverage_over_configs,
)
from .errors import CapCoverError, DomainError, NumericError
from .optimize import OptimizationTrace, OptimizerConfig, compare_to_bounds, crn_objective, local_search
from .sampling import (
    Configuration,
    RngSpec,
    ZoneSpec,
    antipodal_configuration,
    configuration_from_json,
    configuration_to_json,
    in_zone,
    random_configuration,
    sample_uniform_sphere,
)
from .special import Tolerance
from .verify import (
    Slab,
    VerificationReport,
    cone_measure_identity_mc,
    run_suite,
    scalar_inequalities,
    sidak_mc,
    truncated_cone_measure,
    zone_quadrature,
)
