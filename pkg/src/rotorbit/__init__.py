"""rotorbit: dynamical invariants of quasiperiodically forced circle maps.

Plateau envelopes and the monotone interpolation homotopy, fibred rotation
numbers and rotation intervals, minimal sets with prescribed rotation number,
dispersal diagnostics with the curve-crossing certificate, and
topological-entropy certificates, plus a batch CLI (`rotorbit`).

Hot loops run in a compiled extension when available; set ROTORBIT_PURE=1
before import to force the pure-Python fallback (see rotorbit.BACKEND).
"""

from ._kernels import BACKEND
from .circlecore import (
    DEFAULT_GRID_M,
    GOLDEN_MEAN,
    FibreFamily,
    FibrePoint,
    GridFunction,
    IntervalSetMod1,
    canonicalize_intervals,
    circle_distance,
    complement_intervals,
    intersect_intervals,
    is_rational_surrogate,
    monotone_lift_inverse,
    monotone_preimage,
    naive_sliding_extremum,
    sliding_extremum,
    union_intervals,
    wrap_mod1,
)
from .cli import RunConfig, SweepSpec, main, parse_config, run_command, run_sweep
from .entropy import (
    CoverLift,
    EntropyCertificate,
    GrowthReport,
    OrbitSegment,
    SeparationCount,
    cover_lift,
    entropy_certificate,
    itinerary_count,
    monotone_entropy_check,
    orbit_metric,
    orbit_segment,
    separation_counts,
)
from .errors import (
    CertificateFailureError,
    ConfigError,
    ContinuationFailureError,
    DepthInsufficientError,
    InconsistentCertificateError,
    InvalidArgumentError,
    NotMonotoneError,
    NumericDegeneracyError,
    OutOfRangeError,
    PropertyViolationError,
    RotorbitError,
)
from .minimalset import (
    MinimalSetCloud,
    SdsmReport,
    SurvivorSet,
    UniformRotationReport,
    cloud_for_rotation,
    combine_sdsm_reports,
    gamma_crossing_certificate,
    omega_limit_cloud,
    sdsm_diagnostics,
    survivor_search,
    uniform_rotation_check,
)
from .plateau import (
    EnvelopePair,
    ForcedMonotoneMap,
    HomotopyMap,
    detect_plateaus,
    envelope,
    envelope_pair,
    forced_map,
    homotopy_map,
    phi_t,
)
from .rotation import (
    LatticeNeighbors,
    LengthBoundReport,
    RotationEstimate,
    RotationInterval,
    TSearchResult,
    ensemble_initial_conditions,
    find_t_for_rho,
    lattice_neighbors,
    rotation_interval,
    rotation_number_monotone,
    verify_length_bound,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DEFAULT_GRID_M",
    "GOLDEN_MEAN",
    "CertificateFailureError",
    "ConfigError",
    "ContinuationFailureError",
    "CoverLift",
    "DepthInsufficientError",
    "EntropyCertificate",
    "EnvelopePair",
    "FibreFamily",
    "FibrePoint",
    "ForcedMonotoneMap",
    "GridFunction",
    "GrowthReport",
    "HomotopyMap",
    "InconsistentCertificateError",
    "IntervalSetMod1",
    "InvalidArgumentError",
    "LatticeNeighbors",
    "LengthBoundReport",
    "MinimalSetCloud",
    "NotMonotoneError",
    "NumericDegeneracyError",
    "OrbitSegment",
    "OutOfRangeError",
    "PropertyViolationError",
    "RotationEstimate",
    "RotationInterval",
    "RotorbitError",
    "RunConfig",
    "SdsmReport",
    "SeparationCount",
    "SurvivorSet",
    "SweepSpec",
    "TSearchResult",
    "UniformRotationReport",
    "canonicalize_intervals",
    "circle_distance",
    "cloud_for_rotation",
    "combine_sdsm_reports",
    "complement_intervals",
    "cover_lift",
    "detect_plateaus",
    "ensemble_initial_conditions",
    "entropy_certificate",
    "envelope",
    "envelope_pair",
    "find_t_for_rho",
    "forced_map",
    "gamma_crossing_certificate",
    "homotopy_map",
    "intersect_intervals",
    "is_rational_surrogate",
    "itinerary_count",
    "lattice_neighbors",
    "main",
    "monotone_entropy_check",
    "monotone_lift_inverse",
    "monotone_preimage",
    "naive_sliding_extremum",
    "omega_limit_cloud",
    "orbit_metric",
    "orbit_segment",
    "parse_config",
    "phi_t",
    "rotation_interval",
    "rotation_number_monotone",
    "run_command",
    "run_sweep",
    "sdsm_diagnostics",
    "separation_counts",
    "sliding_extremum",
    "survivor_search",
    "uniform_rotation_check",
    "union_intervals",
    "verify_length_bound",
    "wrap_mod1",
]
