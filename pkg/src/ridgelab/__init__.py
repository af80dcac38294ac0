"""ridgelab: discrete ridge transforms on prime grids, a register-level
statevector pipeline implementing them, and node-sampling pruning
experiments with a random-features baseline."""

from . import errors
from .zp_core import (
    all_coords,
    coords_from_linear,
    dense_limit,
    is_prime,
    linear_index,
    mod_inverse,
    scale_vector_mod,
)
from .transforms import (
    ActivationPair,
    GridFunction,
    RidgeletCoeffs,
    admissibility_constant,
    dft1,
    dftD,
    fourier_slice_check,
    load_coeffs_csv,
    load_grid_csv,
    normalize_activation,
    ridgelet_analyze,
    ridgelet_synthesize,
    save_coeffs_csv,
    save_grid_csv,
)
from .qsim import (
    QuditState,
    RidgeletOperator,
    build_r_dense,
    measure_samples,
    qrt_apply,
    qrt_stage_count,
)
from .lottery import (
    DecayClassParams,
    EmpiricalData,
    OptimizedDistribution,
    RidgeSolution,
    Subnetwork,
    empirical_risk,
    high_weight_set,
    ingest_dataset,
    optimized_distribution,
    optimized_distribution_via_state,
    sample_indices,
    sample_nodes,
    solve_ridge,
    sampling_parameters,
    train_subnetwork,
)
from .experiment import (
    ExperimentConfig,
    RunRecord,
    emit_outputs,
    run_experiment,
    verify_all,
)

__version__ = "0.1.0"

__all__ = [
    "errors",
    "all_coords",
    "coords_from_linear",
    "dense_limit",
    "is_prime",
    "linear_index",
    "mod_inverse",
    "scale_vector_mod",
    "ActivationPair",
    "GridFunction",
    "RidgeletCoeffs",
    "admissibility_constant",
    "dft1",
    "dftD",
    "fourier_slice_check",
    "load_coeffs_csv",
    "load_grid_csv",
    "normalize_activation",
    "ridgelet_analyze",
    "ridgelet_synthesize",
    "save_coeffs_csv",
    "save_grid_csv",
    "QuditState",
    "RidgeletOperator",
    "build_r_dense",
    "measure_samples",
    "qrt_apply",
    "qrt_stage_count",
    "DecayClassParams",
    "EmpiricalData",
    "OptimizedDistribution",
    "RidgeSolution",
    "Subnetwork",
    "empirical_risk",
    "high_weight_set",
    "ingest_dataset",
    "optimized_distribution",
    "optimized_distribution_via_state",
    "sample_indices",
    "sample_nodes",
    "solve_ridge",
    "sampling_parameters",
    "train_subnetwork",
    "ExperimentConfig",
    "RunRecord",
    "emit_outputs",
    "run_experiment",
    "verify_all",
]
