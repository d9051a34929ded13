"""Weighted Chebyshev and residual polynomials on unions of real intervals,
with the logarithmic potential theory needed to bound them."""

from .bounds import (
    DichotomyReport,
    SweepResult,
    WidomReport,
    bound_report,
    sweep,
    szego_dichotomy_report,
    widom_factor,
)
from .ensets import (
    BandSet,
    RationalFrame,
    blaschke_magnitude,
    build_rational_frame,
    compute_band_set,
    compute_n0,
    verify_band_measures,
    verify_cosh_identity,
)
from .errors import ChebpotError
from .extremal import (
    AlternationReport,
    ExtremalPoly,
    RemezOptions,
    renormalize,
    solve_extremal,
    verify_alternation,
)
from .potential import (
    CriticalPoint,
    EquilibriumData,
    GreenEvaluator,
    HarmonicMeasure,
    PairMeasure,
    SzegoIntegral,
    conjugate_pair_measure,
    critical_points,
    equilibrium,
    green,
    green_cross,
    harmonic_measure,
    pw_sum,
    szego_factor,
    szego_integral,
    szego_recip_poly,
)
from .realset import FiniteGapSet, Gap, gaps, make_set, sample_grid
from .weights import (
    AbsPolyWeight,
    CallableWeight,
    ProductWeight,
    RecipPolyWeight,
    SampledWeight,
    SemicircleWeight,
    UnitWeight,
    Weight,
    exp_inv_abs_weight,
)

__version__ = "0.1.0"

__all__ = [
    "AbsPolyWeight",
    "AlternationReport",
    "BandSet",
    "CallableWeight",
    "ChebpotError",
    "CriticalPoint",
    "DichotomyReport",
    "EquilibriumData",
    "ExtremalPoly",
    "FiniteGapSet",
    "Gap",
    "GreenEvaluator",
    "HarmonicMeasure",
    "PairMeasure",
    "ProductWeight",
    "RationalFrame",
    "RecipPolyWeight",
    "RemezOptions",
    "SampledWeight",
    "SemicircleWeight",
    "SweepResult",
    "SzegoIntegral",
    "UnitWeight",
    "Weight",
    "WidomReport",
    "blaschke_magnitude",
    "bound_report",
    "build_rational_frame",
    "compute_band_set",
    "compute_n0",
    "conjugate_pair_measure",
    "critical_points",
    "equilibrium",
    "exp_inv_abs_weight",
    "gaps",
    "green",
    "green_cross",
    "harmonic_measure",
    "make_set",
    "pw_sum",
    "renormalize",
    "sample_grid",
    "solve_extremal",
    "sweep",
    "szego_dichotomy_report",
    "szego_factor",
    "szego_integral",
    "szego_recip_poly",
    "verify_alternation",
    "verify_band_measures",
    "verify_cosh_identity",
    "widom_factor",
]
