"""Energy descent for pairwise particle interactions and dimensionality diagnostics."""

from ._core import (
    ParticleConfiguration,
    PotentialSpec,
    SingularPairError,
    ValidationError,
    __version__,
    classify_dimension,
    classify_repulsion,
    estimate_correlation_dimension,
    euler_lagrange_check,
    eval_laplacian_radial,
    eval_w,
    eval_w_prime,
    fattening_curve_2d,
    forces,
    init_configuration,
    minimize,
    read_csv,
    run_sweep,
    total_energy,
    validate_potential,
    write_csv,
)

__all__ = [
    "ParticleConfiguration",
    "PotentialSpec",
    "SingularPairError",
    "ValidationError",
    "__version__",
    "classify_dimension",
    "classify_repulsion",
    "estimate_correlation_dimension",
    "euler_lagrange_check",
    "eval_laplacian_radial",
    "eval_w",
    "eval_w_prime",
    "fattening_curve_2d",
    "forces",
    "init_configuration",
    "minimize",
    "read_csv",
    "run_sweep",
    "total_energy",
    "validate_potential",
    "write_csv",
]
