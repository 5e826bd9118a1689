"""Chaoticity diagnostics and approximate integrals of motion for the
quantum Henon-Heiles system in a truncated oscillator basis."""

from .oscillator import (
    FockBasis,
    FockState,
    ModelParameters,
    OperatorMatrix,
    angular_momentum_matrix,
    build_basis,
    h0_matrix,
    hamiltonian,
    ladder_matrix,
    number_operators,
    parity_vector,
    position_matrix,
    v_matrix,
)
from .eigensolver import Spectrum, diagonalize, subspace_solve
from .metrics import (
    MetricsRow,
    StrengthFunction,
    dominant_shell,
    fragmentation_ratio,
    hose_taylor_projection,
    kappa,
    metrics_for_spectrum,
    ms_deviation,
    shell_average,
    shell_spreading_width,
    spreading_width,
    strength_function,
    shell_strength_function,
    sweep_metrics,
)
from .integrals import (
    ApproxIntegral,
    IntegralStudy,
    ModelSpace,
    UnitaryTransform,
    build_model_space,
    build_unitary,
    delta_jprime_study,
    integrable_hamiltonian,
    integrable_hamiltonian_explicit,
    integral_diagonal,
    norm_bound_check,
    transform_integral,
)
from .projectors import (
    LadderWord,
    haar_projector_check,
    lowering_word,
    shell_projector,
    sinc_projector,
    state_builder,
    transition_operator,
)
from .spacings import (
    SpacingSample,
    SymmetryLabel,
    classify_symmetry,
    spacing_distance,
    unfold,
)

__version__ = "0.1.0"
