"""Registration-based dimensionality reduction on low-rank moving grids."""

from ._rgr import (  # noqa: F401
    ArModel,
    AdvectionOracle,
    ConfigError,
    Dataset,
    InfeasibleError,
    InvalidDataError,
    LatentSeries,
    LowRankFactors,
    MovingGrid,
    NumericalError,
    ObjectiveParts,
    PdeRunConfig,
    ReferenceGrid,
    RegistrationProblem,
    RegistrationResult,
    VolumeReport,
    advecting_gaussian,
    burgers_solve,
    cell_volumes,
    evaluate_objective,
    extend_grid,
    fit_ar,
    frobenius_error,
    init_from_reference,
    initialize_grid,
    map_forward,
    map_inverse,
    predict,
    read_matrix,
    reconstruct,
    reconstruct_prediction,
    rotated_glyph,
    run_experiment,
    second_difference,
    singular_values,
    train,
    truncated_svd,
    validate_diffeomorphism,
    wave_solve,
    write_matrix,
)

__all__ = [name for name in dir() if not name.startswith("_")]
