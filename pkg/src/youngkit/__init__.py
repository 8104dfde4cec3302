"""Discrete measures, Young functions, graph measures and varifolds."""

from .errors import (
    AtomFloorViolation,
    CarrierMismatchError,
    DegenerateMeasureError,
    DimensionMismatchError,
    InvalidBatteryError,
    InvalidInputError,
    MassMismatchError,
)
from .measure import (
    DiscreteMeasure,
    ProbabilityMeasure,
    as_probability,
    coalesce,
    convolve,
    dirac,
    first_moment,
    integrate,
    marginal,
    mixture,
    normalize,
    product,
    pushforward,
    restrict,
    total_mass,
)
from .transport import TransportPlan, dual_lower_bound, w1, w1_1d, w1_exact
from .testfunctions import Battery, TestFunction, bump, tensor, tensor_battery, truncated_linear, truncated_linear_battery
from .young import (
    YoungFunction,
    convolve_yf,
    from_function,
    from_q_valued,
    lipschitz_bound,
    product_yf,
    pushforward_yf,
)
from .graph import GraphMeasure, build, disintegrate, disintegrate_clustered, integrate_graph, marginal_x, tightness_profile
from .varifold import (
    DiscreteVarifold,
    Plane,
    PolylineVarifold,
    first_variation_mass,
    from_polyline,
    lift_young,
    regular_polygon,
    tangent_young,
    weight_measure,
)
from .convergence import (
    ConvergenceReport,
    cluster_limit_estimate,
    p1_convergence_check,
    pairs_compactness_experiment,
    run_scenario,
    scenario_atom_floor,
    scenario_escaping_mass,
    scenario_oscillation,
    scenario_parallel_lines,
    weak_distance,
)

__version__ = "0.1.0"
