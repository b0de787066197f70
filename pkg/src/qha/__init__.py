"""Finite phase-space toolkit.

Quantum-harmonic-analysis style convolutions on the N x N torus lattice:
time-frequency shifts and STFTs on C^N, function-operator and
operator-operator convolutions with exact finite identities, mixed-state
localization operators and their spectra, and accumulated quadratic
time-frequency distributions with the error metrics that compare them to
domain indicators.
"""

__version__ = "0.1.0"

from .accumulation import (
    AccumulatedDistribution,
    accumulate,
    cohen_distribution,
    l1_error,
    levelset_measure,
    reconstruction_identity_check,
)
from .convolution import fun_fun_conv, fun_op_conv, op_op_conv, reflect_grid, s_tilde
from .errors import (
    BadDelta,
    BadSmoother,
    BadWeights,
    BoundViolation,
    ConfigError,
    ConsistencyFailure,
    EmptyDomain,
    InvalidDensity,
    MismatchedState,
    NotABall,
    NotHermitian,
    QhaError,
    ShapeTooLarge,
    ZeroVector,
)
from .experiments import (
    ExperimentConfig,
    IdentityRecord,
    IdentityReport,
    SweepRecord,
    SweepRow,
    Tolerances,
    compute_sweep_row,
    parse_shape,
    random_domain,
    random_state,
    random_vector,
    run_convergence_sweep,
    run_identities,
    run_plunge_sweep,
    run_sharpness,
    shape_to_mapping,
)
from .lattice import (
    Ball,
    Domain,
    ExplicitMask,
    PhaseLattice,
    Rectangle,
    ShapeSpec,
    domain_from_points,
    full_domain,
    rasterize,
    shape_fits,
)
from .localization import (
    LocalizationResult,
    analyze,
    ceil_measure,
    deficiency,
    localization_operator,
    plunge_count,
    projection_functional,
    second_moment,
    summarize,
)
from .serialize import (
    fmt,
    load_domain_json,
    load_eigenvalues_csv,
    load_grid_csv,
    load_grid_json,
    load_operator_csv,
    load_operator_json,
    save_domain_json,
    save_eigenvalues_csv,
    save_grid_csv,
    save_grid_json,
    save_operator_csv,
    save_operator_json,
    save_phase_function,
    sha256_file,
    versions,
    write_manifest,
)
from .operators import (
    EigenDecomposition,
    adjoint,
    apply,
    eigh,
    matmul,
    parity_conjugate,
    stft,
    tf_shift,
    trace,
    translate_op,
)
from .states import (
    DensityOperator,
    ValidationReport,
    WindowFamily,
    gaussian_state,
    gaussian_window,
    hermite_family,
    mixture,
    mstar_norm_sq,
    parity_operator,
    parse_state_spec,
    rank_one_state,
    smoothed_state,
    state_decomposition,
    thermal_state,
    validate_density,
)
