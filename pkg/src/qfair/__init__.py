"""qfair: exact quantum-state simulation for fairness auditing and
amplitude-amplification parity repair."""

from .amplification import (
    AmplificationPlan,
    apply_grover_iterations,
    build_protected_projector,
    cross_partition_disparity,
    find_parity_iterations,
    grover_operator,
    oracle_reflection,
    predict_probability,
    repair_parity,
    state_reflection,
    subspace_mass,
)
from .encoding import (
    FeatureRecord,
    ScoreTable,
    amplitude_encode,
    basis_encode,
    decode_basis_record,
    prepare_scored_state,
    uniform_superposition,
)
from .errors import (
    DegenerateMassError,
    DimensionMismatch,
    IncompletePovmError,
    InputError,
    InvariantViolation,
    NonCommutingMeasurementsError,
    QfairError,
    ValidationError,
    ZeroProbabilityError,
)
from .fairness import (
    LipschitzReport,
    ParityReport,
    PartitionSpec,
    disparate_impact_ratio,
    lipschitz_check_entropy,
    lipschitz_check_metric,
    lipschitz_check_povm,
    partition_povm,
    quantum_fairness_gap,
    sequential_group_outcome_audit,
    statistical_parity_probs,
    total_variation,
)
from .linalg import (
    DensityMatrix,
    MatrixOperator,
    Povm,
    StateVector,
    apply,
    basis_state,
    commutator_norm,
    compose,
    dagger,
    evolve_density,
    haar_random_unitary,
    hadamard,
    hermitian_fn,
    identity,
    pauli_x,
    pauli_z,
    phase_equal,
    pure_density,
    tensor,
)
from .measurement import (
    OutcomeDistribution,
    basis_povm,
    born_probabilities,
    entangled_state_check,
    post_measurement_state,
    sample,
    sample_basis,
)
from .metrics import (
    MetricChoice,
    fidelity,
    fidelity_angle,
    hamming,
    relative_entropy,
    state_distance,
    trace_distance,
)

__version__ = "0.1.0"
