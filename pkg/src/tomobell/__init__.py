"""Tomographic probability representation of qudit states, qubit-portraits
of qudit tomograms, and Bell-functional maximization."""

from .bell import (
    BellEvaluation,
    BellFunctional,
    BellSettings,
    CHSH_CLASSICAL_BOUND,
    CHSH_KERNEL,
    build_stochastic_matrix,
    chsh_value,
    equality_probability,
    i3_value,
)
from .linalg import (
    TOL,
    Tolerances,
    adjoint,
    exp_antihermitian,
    hermitian_eigenvalues,
    multiply,
    tensor,
    trace,
)
from .optimizer import (
    BellMaximum,
    BracketError,
    OptimizerConfig,
    find_threshold,
    maximize_chsh,
    maximize_i3,
    nelder_mead,
)
from .portrait import (
    Partition,
    enumerate_bipartitions,
    qubit_portrait,
    two_qubit_portrait,
)
from .states import (
    InvariantViolation,
    flip_operator,
    isotropic_state,
    load_density_matrix,
    max_entangled,
    partial_trace,
    purity,
    save_density_matrix,
    separability_threshold,
    singlet_fraction,
    validate_density_matrix,
    werner_state,
)
from .tomography import (
    correlation,
    local_spin_tomogram,
    local_unitary_tomogram,
    spin_tomogram,
    tomogram_expectation,
    unitary_tomogram,
)
from .wigner import (
    MeasurementDirection,
    jacobi_polynomial,
    spin_operator_y,
    wigner_D,
    wigner_small_d,
    wigner_small_d_matrix,
)

__version__ = "0.1.0"
