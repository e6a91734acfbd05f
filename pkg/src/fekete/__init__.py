"""Weighted Fekete points, Bergman measures and interpolation distortion."""

from .bergman import (
    BMDiagnostic,
    BergmanField,
    bergman_field,
    bergman_measure,
    bm_growth_diagnostic,
    extremal_weight_estimate,
    rho_at,
    rho_values,
)
from .configurations import (
    FeketeResult,
    Method,
    RecursiveTrace,
    asymptotic_fekete_check,
    fekete_search,
    k_diameter,
    leja_result,
    leja_sequence,
    recursively_extremal,
    weighted_vandermonde,
)
from .design import (
    OptimalMeasureResult,
    Pair,
    distortion,
    distortion_growth_report,
    lagrange_system,
    lebesgue_constant,
    optimal_measure_fixed_point,
)
from .errors import ConvergenceError, DomainError, FeketeError, SingularError
from .gram import GramSystem, det_section_l2_identity_check, gram_system, l_functional, volume_ratio_log
from .measures import (
    Configuration,
    DiscreteMeasure,
    ReferenceLaw,
    equilibrium_oracle,
    harmonic_discrepancy,
    ks_distance,
    reference_equilibrium,
)
from .model_spaces import (
    COMPLEX_LINE,
    SPHERE2,
    Weight,
    WeightedSet,
    circle,
    dimension,
    disk,
    interval,
    point_cloud,
    sphere,
)

__all__ = [
    "asymptotic_fekete_check",
    "bergman_field",
    "bergman_measure",
    "BergmanField",
    "bm_growth_diagnostic",
    "BMDiagnostic",
    "circle",
    "COMPLEX_LINE",
    "Configuration",
    "ConvergenceError",
    "det_section_l2_identity_check",
    "dimension",
    "DiscreteMeasure",
    "disk",
    "distortion",
    "distortion_growth_report",
    "DomainError",
    "equilibrium_oracle",
    "extremal_weight_estimate",
    "fekete_search",
    "FeketeError",
    "FeketeResult",
    "gram_system",
    "GramSystem",
    "harmonic_discrepancy",
    "interval",
    "k_diameter",
    "ks_distance",
    "l_functional",
    "lagrange_system",
    "lebesgue_constant",
    "leja_result",
    "leja_sequence",
    "Method",
    "optimal_measure_fixed_point",
    "OptimalMeasureResult",
    "Pair",
    "point_cloud",
    "recursively_extremal",
    "RecursiveTrace",
    "reference_equilibrium",
    "ReferenceLaw",
    "rho_at",
    "rho_values",
    "SingularError",
    "sphere",
    "SPHERE2",
    "volume_ratio_log",
    "Weight",
    "weighted_vandermonde",
    "WeightedSet",
]

__version__ = "0.1.0"
