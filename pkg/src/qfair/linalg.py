"""Dense complex linear algebra for n-qubit states and operators.

Qubit 1 is the most significant bit of the basis index: the basis state
labelled x1 x2 ... xn sits at index sum(x_k * 2**(n-k)). All values are
immutable after construction (arrays are marked read-only) and every
operation is a pure function, so everything here is safe to share
between threads.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, IncompletePovmError, ValidationError

# Structural invariants (normalisation, hermiticity, unitarity, ...) are held
# to TOL_STRUCT; composed numerical results to TOL_RESULT.
TOL_STRUCT = 1e-10
TOL_RESULT = 1e-9

# Dense-storage ceilings: vectors up to 2^20 amplitudes, matrices up to
# 2^10 x 2^10. Larger registers must use mask/sweep code paths.
MAX_STATE_QUBITS = 20
MAX_MATRIX_QUBITS = 10

OPERATOR_KINDS = ("unitary", "projector", "effect", "general")


def _as_complex_array(values, ndim: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128, order="C")
    if arr.ndim != ndim:
        raise ValidationError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    return arr


def _qubit_count(dim: int, what: str) -> int:
    n = int(dim).bit_length() - 1
    if dim <= 0 or 2**n != dim:
        raise ValidationError(f"{what} dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure n-qubit state: 2**n complex amplitudes with unit norm."""

    amplitudes: np.ndarray
    num_qubits: int = field(init=False)
    atol: InitVar[float] = TOL_STRUCT

    def __post_init__(self, atol: float):
        amps = _as_complex_array(self.amplitudes, 1, "state vector")
        n = _qubit_count(amps.size, "state vector")
        if n > MAX_STATE_QUBITS:
            raise ValidationError(f"state vectors support up to {MAX_STATE_QUBITS} qubits, got {n}")
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > atol:
            raise ValidationError(f"state vector norm² = {norm_sq!r}, expected 1 within {atol}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "num_qubits", n)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def probabilities(self) -> np.ndarray:
        """Born probabilities of a full computational-basis measurement."""
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Mixed or pure state: Hermitian, positive semidefinite, unit trace."""

    matrix: np.ndarray
    dim: int = field(init=False)
    atol: InitVar[float] = TOL_STRUCT

    def __post_init__(self, atol: float):
        mat = _as_complex_array(self.matrix, 2, "density matrix")
        if mat.shape[0] != mat.shape[1]:
            raise ValidationError(f"density matrix must be square, got {mat.shape}")
        if _qubit_count(mat.shape[0], "density matrix") > MAX_MATRIX_QUBITS:
            raise ValidationError(f"density matrices support up to {MAX_MATRIX_QUBITS} qubits")
        if np.max(np.abs(mat - mat.conj().T)) > atol:
            raise ValidationError("density matrix is not Hermitian")
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > atol:
            raise ValidationError(f"density matrix trace = {trace!r}, expected 1")
        if float(np.min(np.linalg.eigvalsh(mat))) < -atol:
            raise ValidationError("density matrix has a negative eigenvalue")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dim", mat.shape[0])

    def purity(self) -> float:
        """tr(rho²); equals 1 for pure states, < 1 for proper mixtures."""
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True, eq=False)
class MatrixOperator:
    """Square operator with a structural tag: unitary, projector, effect or general."""

    matrix: np.ndarray
    kind: str = "general"
    dim: int = field(init=False)
    atol: InitVar[float] = TOL_STRUCT

    def __post_init__(self, atol: float):
        mat = _as_complex_array(self.matrix, 2, "operator")
        if mat.shape[0] != mat.shape[1]:
            raise ValidationError(f"operator must be square, got {mat.shape}")
        if _qubit_count(mat.shape[0], "operator") > MAX_MATRIX_QUBITS:
            raise ValidationError(f"dense operators support up to {MAX_MATRIX_QUBITS} qubits")
        if self.kind not in OPERATOR_KINDS:
            raise ValidationError(f"unknown operator kind {self.kind!r}")
        d = mat.shape[0]
        if self.kind == "unitary":
            if np.max(np.abs(mat.conj().T @ mat - np.eye(d))) > atol:
                raise ValidationError("operator tagged unitary fails U†U = I")
        elif self.kind == "projector":
            if np.max(np.abs(mat - mat.conj().T)) > atol:
                raise ValidationError("projector is not Hermitian")
            if np.max(np.abs(mat @ mat - mat)) > atol:
                raise ValidationError("projector fails P² = P")
        elif self.kind == "effect":
            if np.max(np.abs(mat - mat.conj().T)) > atol:
                raise ValidationError("effect is not Hermitian")
            if float(np.min(np.linalg.eigvalsh((mat + mat.conj().T) / 2))) < -atol:
                raise ValidationError("effect has a negative eigenvalue")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dim", mat.shape[0])


@dataclass(frozen=True, eq=False)
class Povm:
    """A complete set of positive effects; outcome m has probability tr(E_m rho)."""

    effects: tuple[MatrixOperator, ...]
    labels: tuple[str, ...] = ()
    atol: InitVar[float] = TOL_STRUCT

    def __post_init__(self, atol: float):
        effects = tuple(self.effects)
        if not effects:
            raise ValidationError("POVM needs at least one effect")
        dim = effects[0].dim
        for e in effects:
            if e.kind not in ("effect", "projector"):
                raise ValidationError("POVM elements must be tagged effect or projector")
            if e.dim != dim:
                raise DimensionMismatch("POVM effects have mixed dimensions")
        labels = tuple(self.labels) if self.labels else tuple(f"E{i}" for i in range(len(effects)))
        if len(labels) != len(effects):
            raise ValidationError("one label per effect required")
        if len(set(labels)) != len(labels):
            raise ValidationError("POVM labels must be unique")
        total = sum(e.matrix for e in effects)
        if np.max(np.abs(total - np.eye(dim))) > atol:
            raise IncompletePovmError("POVM effects do not sum to the identity")
        object.__setattr__(self, "effects", effects)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.effects[0].dim

    def __len__(self) -> int:
        return len(self.effects)


# ---------------------------------------------------------------------------
# constructors for common operators and states


def identity(dim: int, kind: str = "unitary") -> MatrixOperator:
    """Identity operator; the kind tag is caller-chosen (I is all of them)."""
    return MatrixOperator(np.eye(dim), kind=kind)


def pauli_x() -> MatrixOperator:
    return MatrixOperator(np.array([[0, 1], [1, 0]]), kind="unitary")


def pauli_z() -> MatrixOperator:
    return MatrixOperator(np.array([[1, 0], [0, -1]]), kind="unitary")


def hadamard() -> MatrixOperator:
    return MatrixOperator(np.array([[1, 1], [1, -1]]) / np.sqrt(2), kind="unitary")


def basis_state(index: int, num_qubits: int) -> StateVector:
    """Computational basis state |index> on num_qubits qubits."""
    dim = 2**num_qubits
    if not 0 <= index < dim:
        raise ValidationError(f"basis index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps)


def haar_random_unitary(dim: int, rng: np.random.Generator) -> MatrixOperator:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    # Fix the phase ambiguity of QR so the distribution is exactly Haar.
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return MatrixOperator(q, kind="unitary")


# ---------------------------------------------------------------------------
# operations


def _tensor_kind(a: str, b: str) -> str:
    if a == b and a in ("unitary", "projector", "effect"):
        return a
    return "general"


def tensor(a, b):
    """Kronecker product of two states or two operators; kind tags propagate."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, MatrixOperator) and isinstance(b, MatrixOperator):
        return MatrixOperator(np.kron(a.matrix, b.matrix), kind=_tensor_kind(a.kind, b.kind))
    raise ValidationError(
        f"tensor needs two StateVectors or two MatrixOperators, got {type(a).__name__}/{type(b).__name__}"
    )


def apply(u: MatrixOperator, psi: StateVector) -> StateVector:
    """Evolve a pure state: returns U|psi>."""
    if u.kind != "unitary":
        raise ValidationError(f"apply requires a unitary operator, got kind={u.kind!r}")
    if u.dim != psi.dim:
        raise DimensionMismatch(f"operator dim {u.dim} != state dim {psi.dim}")
    return StateVector(u.matrix @ psi.amplitudes)


def evolve_density(u: MatrixOperator, rho: DensityMatrix) -> DensityMatrix:
    """Evolve a density matrix: returns U rho U†."""
    if u.kind != "unitary":
        raise ValidationError(f"evolve_density requires a unitary operator, got kind={u.kind!r}")
    if u.dim != rho.dim:
        raise DimensionMismatch(f"operator dim {u.dim} != state dim {rho.dim}")
    return DensityMatrix(u.matrix @ rho.matrix @ u.matrix.conj().T)


def dagger(op: MatrixOperator) -> MatrixOperator:
    """Hermitian adjoint; unitary/projector/effect tags survive conjugate transpose."""
    return MatrixOperator(op.matrix.conj().T, kind=op.kind)


def compose(a: MatrixOperator, b: MatrixOperator) -> MatrixOperator:
    """Operator product a·b (apply b first); unitary only if both are unitary."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"operator dims differ: {a.dim} != {b.dim}")
    kind = "unitary" if a.kind == b.kind == "unitary" else "general"
    return MatrixOperator(a.matrix @ b.matrix, kind=kind)


def pure_density(psi: StateVector) -> DensityMatrix:
    """Rank-1 density matrix |psi><psi|."""
    return DensityMatrix(np.outer(psi.amplitudes, psi.amplitudes.conj()))


def hermitian_fn(
    m: MatrixOperator | DensityMatrix,
    f: Callable[[np.ndarray], np.ndarray],
    clamp: bool = False,
    atol: float = TOL_STRUCT,
) -> MatrixOperator:
    """Apply a scalar function to a Hermitian operator through its eigenvalues.

    With clamp=True, eigenvalues in [-atol, 0) are zeroed before f is applied,
    which keeps sqrt/log/abs well defined against eigensolver roundoff.
    """
    mat = m.matrix
    if np.max(np.abs(mat - mat.conj().T)) > atol:
        raise ValidationError("hermitian_fn requires a Hermitian operator")
    w, v = np.linalg.eigh((mat + mat.conj().T) / 2)
    if clamp:
        w = np.where((w >= -atol) & (w < 0), 0.0, w)
    return MatrixOperator((v * f(w)) @ v.conj().T, kind="general")


def commutator_norm(a: MatrixOperator, b: MatrixOperator) -> float:
    """Spectral norm of the commutator AB - BA; 0 iff the operators commute."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"operator dims differ: {a.dim} != {b.dim}")
    c = a.matrix @ b.matrix - b.matrix @ a.matrix
    return float(np.linalg.norm(c, 2))


def phase_equal(a: StateVector, b: StateVector, atol: float = TOL_STRUCT) -> bool:
    """True when the states agree up to a global phase.

    The phase is aligned at a's largest-magnitude amplitude, then the
    vectors are compared entrywise.
    """
    if a.dim != b.dim:
        return False
    k = int(np.argmax(np.abs(a.amplitudes)))
    if abs(b.amplitudes[k]) < atol:
        return False
    phase = b.amplitudes[k] / a.amplitudes[k]
    phase /= abs(phase)
    return bool(np.max(np.abs(a.amplitudes * phase - b.amplitudes)) <= atol)
