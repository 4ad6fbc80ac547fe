"""Born-rule outcome distributions, state update after measurement, and
seeded sampling of measurement outcomes."""

from __future__ import annotations

from dataclasses import InitVar, dataclass, field

import numpy as np

from .errors import DimensionMismatch, ValidationError, ZeroProbabilityError
from .linalg import TOL_STRUCT, DensityMatrix, MatrixOperator, Povm, StateVector

# Recorded in reports so sampled histograms are reproducible bit-for-bit:
# inverse-CDF draws against the exact Born distribution, uniforms from
# numpy's PCG64 generator seeded per call.
SAMPLER_ID = "inverse-cdf/numpy-PCG64"

# Outcomes with squared amplitude below this are treated as impossible.
ZERO_PROBABILITY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Probability per outcome label; sums to 1."""

    labels: tuple[str, ...]
    probabilities: np.ndarray
    atol: InitVar[float] = TOL_STRUCT

    def __post_init__(self, atol: float):
        labels = tuple(self.labels)
        probs = np.asarray(self.probabilities, dtype=np.float64).copy()
        if len(labels) != probs.size:
            raise ValidationError("one probability per label required")
        if float(np.min(probs)) < -atol or float(np.max(probs)) > 1 + atol:
            raise ValidationError("probabilities must lie in [0, 1]")
        probs = np.clip(probs, 0.0, 1.0)
        if abs(float(np.sum(probs)) - 1.0) > atol:
            raise ValidationError(f"probabilities sum to {float(np.sum(probs))!r}, expected 1")
        probs.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probabilities", probs)

    def __getitem__(self, label: str) -> float:
        return float(self.probabilities[self.labels.index(label)])

    def as_dict(self) -> dict[str, float]:
        return {label: float(p) for label, p in zip(self.labels, self.probabilities)}


def _state_density(state: StateVector | DensityMatrix) -> np.ndarray:
    if isinstance(state, DensityMatrix):
        return state.matrix
    return np.outer(state.amplitudes, state.amplitudes.conj())


def _state_dim(state: StateVector | DensityMatrix) -> int:
    return state.dim


def born_probabilities(state: StateVector | DensityMatrix, povm: Povm) -> OutcomeDistribution:
    """Outcome distribution p(m) = tr(E_m rho) for a complete POVM."""
    if povm.dim != _state_dim(state):
        raise DimensionMismatch(f"POVM dim {povm.dim} != state dim {_state_dim(state)}")
    if isinstance(state, StateVector):
        # <psi|E|psi> avoids materialising the rank-1 density matrix.
        amps = state.amplitudes
        probs = [float(np.real(amps.conj() @ (e.matrix @ amps))) for e in povm.effects]
    else:
        rho = state.matrix
        probs = [float(np.real(np.trace(e.matrix @ rho))) for e in povm.effects]
    return OutcomeDistribution(labels=povm.labels, probabilities=np.array(probs))


def post_measurement_state(psi: StateVector, m_op: MatrixOperator) -> tuple[StateVector, float]:
    """State after observing the outcome of measurement operator M.

    Returns (M|psi> / sqrt(p), p) with p = <psi|M†M|psi>. A numerically
    zero p means the outcome cannot occur; that is raised as
    ZeroProbabilityError rather than silently renormalised.
    """
    if m_op.dim != psi.dim:
        raise DimensionMismatch(f"operator dim {m_op.dim} != state dim {psi.dim}")
    v = m_op.matrix @ psi.amplitudes
    p = float(np.real(v.conj() @ v))
    if p <= ZERO_PROBABILITY_TOL:
        raise ZeroProbabilityError(f"outcome probability {p!r} is numerically zero")
    return StateVector(v / np.sqrt(p)), p


def _draw_counts(probabilities: np.ndarray, shots: int, seed: int) -> np.ndarray:
    """Inverse-CDF draws from an exact distribution; zero-probability outcomes
    can never be hit (their CDF bins have zero width)."""
    if shots < 1:
        raise ValidationError(f"shots must be >= 1, got {shots}")
    edges = np.cumsum(probabilities)
    edges[-1] = max(edges[-1], 1.0)  # guard the final bin against 1-ulp shortfall
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.random(shots)
    outcomes = np.searchsorted(edges, draws, side="right")
    return np.bincount(outcomes, minlength=probabilities.size)


def sample(
    state: StateVector | DensityMatrix, povm: Povm, shots: int, seed: int
) -> dict[str, int]:
    """Draw i.i.d. outcomes from the exact Born distribution.

    Deterministic for a fixed seed (see SAMPLER_ID). The histogram lists
    every POVM label, including zero counts, in POVM order.
    """
    dist = born_probabilities(state, povm)
    counts = _draw_counts(dist.probabilities, shots, seed)
    return {label: int(c) for label, c in zip(dist.labels, counts)}


def sample_basis(psi: StateVector, shots: int, seed: int) -> dict[str, int]:
    """Full computational-basis sampling straight from the amplitudes.

    Avoids materialising 2**n projectors, so it scales to the full 20-qubit
    range. Only observed outcomes appear in the histogram, keyed by bit
    string in ascending basis order.
    """
    counts = _draw_counts(psi.probabilities(), shots, seed)
    n = psi.num_qubits
    return {
        format(index, f"0{n}b"): int(c) for index, c in enumerate(counts) if c > 0
    }


def entangled_state_check(psi: StateVector) -> bool:
    """Schmidt-rank test for two-qubit pure states: True iff entangled."""
    if psi.num_qubits != 2:
        raise ValidationError(f"entanglement check supports 2 qubits, got {psi.num_qubits}")
    singular_values = np.linalg.svd(psi.amplitudes.reshape(2, 2), compute_uv=False)
    return bool(singular_values[1] > 1e-10)


def basis_povm(n: int) -> Povm:
    """Projective POVM of all 2**n computational basis outcomes, labelled by bit string."""
    dim = 2**n
    effects = []
    labels = []
    for index in range(dim):
        mat = np.zeros((dim, dim), dtype=np.complex128)
        mat[index, index] = 1.0
        effects.append(MatrixOperator(mat, kind="projector"))
        labels.append(format(index, f"0{n}b"))
    return Povm(effects=tuple(effects), labels=tuple(labels))
