"""qudiv: measurement-divergence toolkit for small quantum systems."""

from .exceptions import (
    EmptyBatchError,
    InvalidDimensionError,
    NotMaximallyEntangledError,
    NumericalInconsistencyError,
    PairingError,
    UnsupportedOutcomeCountError,
)
from .hilbert import (
    DensityMatrix,
    Povm,
    PureState,
    antisym_projector,
    expectation,
    swap_operator,
    sym_projector,
    tensor,
)
from .haar import (
    HypersphericalCoords,
    SampleBatch,
    coords_to_state,
    moment_check,
    sample_haar_angles,
    sample_haar_gaussian,
    volume_density,
)
from .divergence import (
    DivergenceOperator,
    Remap,
    correlation_remap,
    divergence_bounds,
    divergence_discrete,
    divergence_isotropic_closed,
    divergence_isotropic_mc,
    divergence_remapped_mc,
    identity_remap,
    inversion_remap,
    mean_divergence,
)
from .scenarios import (
    JointStateSpec,
    bell_basis_check,
    bell_state,
    factorization_check,
    measure_joint,
    prediction_game,
    qrng_generate,
    resolve,
    singlet_beamsplitter,
)
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "KERNEL_BACKEND",
    "EmptyBatchError",
    "InvalidDimensionError",
    "NotMaximallyEntangledError",
    "NumericalInconsistencyError",
    "PairingError",
    "UnsupportedOutcomeCountError",
    "DensityMatrix",
    "Povm",
    "PureState",
    "antisym_projector",
    "expectation",
    "swap_operator",
    "sym_projector",
    "tensor",
    "HypersphericalCoords",
    "SampleBatch",
    "coords_to_state",
    "moment_check",
    "sample_haar_angles",
    "sample_haar_gaussian",
    "volume_density",
    "DivergenceOperator",
    "Remap",
    "correlation_remap",
    "divergence_bounds",
    "divergence_discrete",
    "divergence_isotropic_closed",
    "divergence_isotropic_mc",
    "divergence_remapped_mc",
    "identity_remap",
    "inversion_remap",
    "mean_divergence",
    "JointStateSpec",
    "bell_basis_check",
    "bell_state",
    "factorization_check",
    "measure_joint",
    "prediction_game",
    "qrng_generate",
    "resolve",
    "singlet_beamsplitter",
]
