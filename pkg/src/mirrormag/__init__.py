"""Stationary Gaussian correlations of two rotating mirrors in a pair of
Laguerre-Gaussian cavities sharing a YIG magnon mode.

The package builds the linearized drift/diffusion matrices of the coupled
mirror-cavity-magnon fluctuation dynamics, solves the steady-state Lyapunov
equation, and evaluates entanglement (logarithmic negativity), two-way
Gaussian steering and Gaussian geometric discord on the mirror pair, with a
sweep engine and CLI that regenerate the reference parameter-scan figures
as CSV data and SVG plots.
"""

__version__ = "0.1.0"

from .model import (
    CANONICAL_ORDERING,
    DerivedParams,
    PhysicalParams,
    SteadyStateError,
    SystemMatrices,
    build_system_matrices,
    derive_params,
    effective_frequency,
    mean_occupation,
)
from .lyapunov import (
    CovarianceMatrix,
    StabilityReport,
    UnstableDriftError,
    check_stability,
    covariance_by_doubling,
    integrate_covariance_ode,
    solve_lyapunov,
)
from .measures import (
    CorrelationSet,
    OffStandardFormWarning,
    TwoModeCM,
    correlation_set,
    extract_two_mode,
    gaussian_steering,
    ggd,
    log_negativity,
    min_pt_symplectic,
    standard_form,
    steering_via_schur,
    symplectic_spectrum,
    tmsv_cm,
)
from .sweep import (
    FIGURE_PRESET_IDS,
    PointRecord,
    SweepAxis,
    SweepResult,
    SweepSpec,
    evaluate_point,
    figure_preset,
    run_sweep,
)

__all__ = [
    "CANONICAL_ORDERING",
    "CorrelationSet",
    "CovarianceMatrix",
    "DerivedParams",
    "FIGURE_PRESET_IDS",
    "OffStandardFormWarning",
    "PhysicalParams",
    "PointRecord",
    "StabilityReport",
    "SteadyStateError",
    "SweepAxis",
    "SweepResult",
    "SweepSpec",
    "SystemMatrices",
    "TwoModeCM",
    "UnstableDriftError",
    "build_system_matrices",
    "check_stability",
    "correlation_set",
    "covariance_by_doubling",
    "derive_params",
    "effective_frequency",
    "evaluate_point",
    "extract_two_mode",
    "figure_preset",
    "gaussian_steering",
    "ggd",
    "integrate_covariance_ode",
    "log_negativity",
    "mean_occupation",
    "min_pt_symplectic",
    "run_sweep",
    "solve_lyapunov",
    "standard_form",
    "steering_via_schur",
    "symplectic_spectrum",
    "tmsv_cm",
]
