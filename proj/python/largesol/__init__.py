"""Large-solution (boundary blow-up) elliptic solvers and diagnostics."""

from ._core import (
    BlowupRateFit,
    BoundednessReport,
    ContinuationResult,
    DiskInit,
    FieldOptions,
    GnnReport,
    GradientField,
    KOReport,
    MonotonicityRegion,
    Nonlinearity,
    PolarField,
    PolarGrid,
    RadialOptions,
    RadialProfile,
    SandwichReport,
    SplitNonlinearity,
    SymmetryReport,
    WTransformResult,
    angular_variation,
    blowup_rate_fit,
    check_bu_condition,
    check_keller_osserman,
    coefficient_b,
    eval_G,
    gnn_hypothesis_check,
    gradient_decomposition,
    inverse_F,
    monotonicity_check_field,
    monotonicity_check_profile,
    moving_plane_check,
    sandwich_check,
    solve_annulus_2d,
    solve_annulus_2d_continuation,
    solve_annulus_radial,
    solve_disk,
    solve_large_continuation,
    solve_truncated,
    solve_w_transform,
    split_asymptotic,
    split_asymptotic_at,
    transform_F,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
