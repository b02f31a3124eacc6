"""SSP Runge-Kutta and integrating-factor time-integration toolkit."""

from .errors import (
    ConfigError,
    NegativeGap,
    NonFinite,
    NotFound,
    SingularTransform,
    SspError,
    UnknownMethod,
)
from .tableau import (
    ButcherTableau,
    OrderReport,
    ShuOsherForm,
    abscissas_nondecreasing,
    butcher_to_canonical_shu_osher,
    order_residuals,
    parse_coefficient,
    shu_osher_to_butcher,
)
from .ssp_radius import (
    CanonicalShuOsher,
    RadiusResult,
    canonical_form,
    is_absolutely_monotonic,
    observed_l2_cfl,
    ssp_radius,
    stability_polynomial,
)
from .methods import (
    FAMILY_CLASSIC,
    FAMILY_PLUS,
    MethodRecord,
    generate_second_order,
    get,
    list_methods,
    method_names,
)
from .expm import ExpCache, build_cache, expm, quantize_gap, required_gaps
from .integrators import (
    SemiDiscretization,
    StepPlan,
    ifrk_step,
    ifrk_step_general,
    integrate,
    make_plan,
    rk_step,
)
from .spatial import (
    Grid1D,
    make_problem,
    upwind_matrix,
    weno5_burgers_rhs,
)
from .analysis import (
    ObservedCoefficient,
    SweepRecord,
    TvTrace,
    convergence_slope,
    ifrk_builder,
    ifrk_general_builder,
    lambda_sweep,
    max_tv_rise,
    observed_tvd_lambda,
    rk_builder,
    sweep_transition,
    total_variation,
    tv_trace,
)
from .optimizer import (
    CertificateReport,
    OptimizationSpec,
    optimize,
    verify_certificate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
