"""Binomial GLM covariate adjustment for two-arm randomized trials."""

from ._canonlink import (
    Cell,
    CellTable,
    DataError,
    EffectError,
    EffectMethod,
    FitResult,
    FitStatus,
    GridRecord,
    GridSpec,
    LinkEstimates,
    LinkKind,
    LinkPattern,
    MarginalEffect,
    NullPreservation,
    PatternReport,
    RankDeficientError,
    coefficient_risk_difference,
    example_trial,
    fit_glm,
    iptw_risk_difference,
    null_preservation_check,
    parse_cell_csv,
    pattern_checks,
    render_cell_csv,
    run_cli,
    run_grid,
    standardized_risk_difference,
)

__all__ = [name for name in dir() if not name.startswith("_")]
