"""Entangled generalized coherent states for interferometric phase estimation."""
from .errors import (
    AdequacyError,
    DegenerateFit,
    DimensionMismatch,
    ModeMismatch,
    NotNormalized,
    ZeroInformation,
    ZeroNorm,
)
from .fock import (
    MultiModeState,
    OperatorMatrix,
    StateVector,
    annihilation,
    coherent_state,
    creation,
    displaced_number_state,
    displacement,
    expectation,
    fidelity,
    fock_state,
    inner,
    normalize,
    number_operator_two_mode,
    required_dim,
    tensor,
    variance,
)
from .metrology import (
    FitResult,
    SweepRecord,
    fit_exponent,
    min_phase_uncertainty,
    phase_generator,
    qfi,
    sweep,
)
from .states import ProbeFamily, apply_phase, ecs, egcs, noon

__version__ = "0.1.0"
