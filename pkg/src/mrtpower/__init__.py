"""Sample-size and power calculator for micro-randomized trials.

Analytic engine: day-level trends for availability and the standardized
proximal effect, the availability/probability-weighted information matrix,
noncentral-F power, and the minimum-N solver. Monte Carlo engine: trajectory
simulation under several error laws and misspecifications with the sandwich
F-test. Service and CLI expose both with identical JSON payloads.
"""
from .errors import (
    ConvergenceError,
    DomainError,
    FieldError,
    MrtPowerError,
    SampleSizeCapError,
    SeriesCapError,
    ValidationError,
)
from .numerics import (
    DEFAULT_TOL,
    Tolerance,
    f_cdf,
    f_quantile,
    noncentral_f_cdf,
    reg_inc_beta,
    solve_bracketed_root,
)
from .trends import DayCurve, TrendSpec, build_curve, effect_basis_coefficients
from .design import (
    RandomizationSchedule,
    StudyDesign,
    build_design,
    information_matrix,
    parse_probability_csv,
    project_effect,
)
from .power import (
    SAMPLE_SIZE_CAP,
    SAMPLE_SIZE_FLOOR,
    PowerCalcResult,
    SampleSizeResult,
    noncentrality,
    power_at,
    solve_sample_size,
)
from .simulate import (
    CORRECTIONS,
    EFFECT_SHAPES,
    ERROR_LAWS,
    VARIANCE_TRENDS,
    FitResult,
    GenerativeModel,
    ScenarioResult,
    Trajectory,
    critical_value,
    effect_shape_curve,
    generate_trajectory,
    run_scenario,
    variance_profile,
    wls_fit,
)

__version__ = "0.1.0"
