"""latspec: numerics for spectral multipliers of the lattice random walk.

The package studies the nearest-neighbour averaging operator on Z^n
through its torus symbol: exact periodized kernels for functions of the
operator, covering geometry for the lattice as a doubling metric space,
multiplier smoothness and decomposition tools, decay certification,
level-surface (restriction) computations, operator-norm estimation, and
a CLI that drives the bundled experiments.
"""

from .decay import (
    BlockNorms,
    PveParams,
    block_norm_matrix,
    fit_pve,
    gaussian_bound_check,
    lattice_ball_volume,
    poly_bound_check,
    squared_kernel_bound_check,
)
from .experiments import REGISTRY, Experiment, ExperimentResult
from .fitting import DecayFit, envelope_bins, power_fit
from .geometry import (
    MetricModel,
    Partition,
    ball_count_check,
    build_net,
    build_partition,
    doubling_fit,
    lattice_box,
    schur_bound,
)
from .lattice import (
    GridSpec,
    LatticeKernel,
    MultiplierFunction,
    TorusSymbol,
    TruncationError,
    apply_walk,
    bochner_riesz_multiplier,
    bump,
    default_grid,
    functional_calculus,
    gaussian_multiplier,
    walk_power_kernel,
    walk_symbol,
    wave_kernel,
)
from .multipliers import (
    AliasingWarning,
    DyadicDecomposition,
    commutator_identity_check,
    duhamel_check,
    dyadic_pieces,
    sobolev_H,
    sobolev_W,
)
from .norms import (
    NormReport,
    bochner_riesz_sweep,
    conv_norm,
    multiplier_bound_check,
    uniform_multiplier_sweep,
    wave_growth_fit,
)
from .surfaces import (
    DisplacementWindow,
    LevelSurface,
    SpectralSlice,
    ball_growth_check,
    band_average,
    curvature,
    density_of_states_check,
    extract_surface,
    gamma_lambda,
    mu_fourier_decay,
    n_lambda_fit,
    restriction_ST_check,
    spectral_norm_decay,
)

__version__ = "0.1.0"

__all__ = [
    "AliasingWarning",
    "BlockNorms",
    "DecayFit",
    "DisplacementWindow",
    "DyadicDecomposition",
    "Experiment",
    "ExperimentResult",
    "GridSpec",
    "LatticeKernel",
    "LevelSurface",
    "MetricModel",
    "MultiplierFunction",
    "NormReport",
    "Partition",
    "PveParams",
    "REGISTRY",
    "SpectralSlice",
    "TorusSymbol",
    "TruncationError",
    "apply_walk",
    "ball_count_check",
    "ball_growth_check",
    "band_average",
    "block_norm_matrix",
    "bochner_riesz_multiplier",
    "bochner_riesz_sweep",
    "build_net",
    "build_partition",
    "bump",
    "commutator_identity_check",
    "conv_norm",
    "curvature",
    "default_grid",
    "density_of_states_check",
    "doubling_fit",
    "duhamel_check",
    "dyadic_pieces",
    "envelope_bins",
    "extract_surface",
    "fit_pve",
    "functional_calculus",
    "gamma_lambda",
    "gaussian_bound_check",
    "gaussian_multiplier",
    "lattice_ball_volume",
    "lattice_box",
    "mu_fourier_decay",
    "multiplier_bound_check",
    "n_lambda_fit",
    "poly_bound_check",
    "power_fit",
    "restriction_ST_check",
    "schur_bound",
    "sobolev_H",
    "sobolev_W",
    "spectral_norm_decay",
    "squared_kernel_bound_check",
    "uniform_multiplier_sweep",
    "walk_power_kernel",
    "walk_symbol",
    "wave_growth_fit",
    "wave_kernel",
]
