"""Amplitude amplification for statistical-parity repair.

Builds the protected-subspace projector and its phase oracle, forms the
two-reflection operator Q, and searches for the iteration count m whose
predicted mass sin²((2m+1)·theta) lands within epsilon of 1/2. Q materialises
as a dense matrix for small registers; larger registers use a rank-structured
sweep (the reflections applied as vector operations) backed by the compiled
kernel when available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._kernels import grover_sweep
from .errors import DegenerateMassError, InvariantViolation, ValidationError
from .fairness import ParityReport, PartitionSpec, statistical_parity_probs
from .linalg import TOL_RESULT, MatrixOperator, StateVector

# Above this qubit count the dense 2^n x 2^n operator is not materialised.
DENSE_QUBIT_LIMIT = 10

MASS_DEGENERATE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class AmplificationPlan:
    """Chosen iteration count and the closed-form prediction behind it.

    `closed_form_m` is the printed single-shot formula evaluated for
    comparison logging only; the plan's `m` always comes from the exhaustive
    search (the two are reported side by side because the formula and the
    search disagree in general).
    """

    theta: float
    initial_mass: float
    m: int
    predicted_mass: float
    achieved: bool
    search_bound: int
    residual_gap: float
    closed_form_m: int

    def __post_init__(self):
        if not 0.0 <= self.initial_mass <= 1.0:
            raise ValidationError(f"initial mass {self.initial_mass!r} outside [0, 1]")
        if abs(self.theta - math.asin(math.sqrt(self.initial_mass))) > 1e-12:
            raise ValidationError("theta != arcsin(sqrt(initial mass))")
        if not 0 <= self.m <= self.search_bound:
            raise ValidationError(f"m = {self.m} outside [0, {self.search_bound}]")
        if abs(self.predicted_mass - predict_probability(self.theta, self.m)) > 1e-12:
            raise ValidationError("predicted mass != sin²((2m+1)·theta)")
        if abs(self.residual_gap - abs(self.predicted_mass - 0.5)) > 1e-12:
            raise ValidationError("residual gap != |predicted mass - 1/2|")

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "initial_mass": self.initial_mass,
            "m": self.m,
            "predicted_mass": self.predicted_mass,
            "achieved": self.achieved,
            "search_bound": self.search_bound,
            "residual_gap": self.residual_gap,
            "closed_form_m": self.closed_form_m,
        }


def build_protected_projector(spec: PartitionSpec, num_qubits: int) -> MatrixOperator:
    """Diagonal projector onto the basis states matching every clause."""
    mask = spec.designated_mask(num_qubits)
    return MatrixOperator(np.diag(mask.astype(np.complex128)), kind="projector")


def oracle_reflection(p: MatrixOperator) -> MatrixOperator:
    """Reflection 2P - I: eigenvalue +1 on range(P), -1 on its complement."""
    if p.kind != "projector":
        raise ValidationError(f"oracle reflection needs a projector, got kind={p.kind!r}")
    return MatrixOperator(2.0 * p.matrix - np.eye(p.dim), kind="unitary")


def state_reflection(psi: StateVector) -> MatrixOperator:
    """Reflection 2|psi><psi| - I: fixes psi, negates its orthogonal complement."""
    outer = np.outer(psi.amplitudes, psi.amplitudes.conj())
    return MatrixOperator(2.0 * outer - np.eye(psi.dim), kind="unitary")


def subspace_mass(psi: StateVector, mask: np.ndarray) -> float:
    """Born probability of landing in the masked set of basis states."""
    return float(np.sum(np.abs(psi.amplitudes[np.asarray(mask, dtype=bool)]) ** 2))


def _check_mass(a: float) -> float:
    if a <= MASS_DEGENERATE_TOL or a >= 1.0 - MASS_DEGENERATE_TOL:
        raise DegenerateMassError(
            f"marked-subspace mass {a!r} is degenerate: the oracle marks nothing or everything"
        )
    return a


def grover_operator(psi: StateVector, p: MatrixOperator) -> MatrixOperator:
    """Q = S_psi · S_chi, the product of the two reflections.

    Each application rotates the span of the marked/unmarked components of
    psi by 2·theta with theta = arcsin(sqrt(<psi|P|psi>)).
    """
    if p.dim != psi.dim:
        raise ValidationError(f"projector dim {p.dim} != state dim {psi.dim}")
    _check_mass(float(np.real(psi.amplitudes.conj() @ (p.matrix @ psi.amplitudes))))
    s_psi = state_reflection(psi)
    s_chi = oracle_reflection(p)
    return MatrixOperator(s_psi.matrix @ s_chi.matrix, kind="unitary")


def predict_probability(theta: float, m: int) -> float:
    """Marked-subspace mass after m iterations: sin²((2m+1)·theta)."""
    if not 0.0 < theta < math.pi / 2:
        raise ValidationError(f"theta must lie in (0, pi/2), got {theta!r}")
    if m < 0:
        raise ValidationError(f"iteration count must be >= 0, got {m}")
    return math.sin((2 * m + 1) * theta) ** 2


def printed_iteration_formula(theta: float, epsilon: float) -> int:
    """The single-shot closed form floor(arcsin(sqrt(|1/2 - eps|)) / (2 theta) - theta).

    Kept verbatim for comparison logging; it is not used to choose m (it
    subtracts an angle from a dimensionless count, so the search result is
    authoritative).
    """
    return math.floor(math.asin(math.sqrt(abs(0.5 - epsilon))) / (2 * theta) - theta)


def find_parity_iterations(theta: float, epsilon: float) -> AmplificationPlan:
    """Smallest m with |sin²((2m+1)·theta) - 1/2| <= epsilon, by direct scan.

    The scan runs over m in [0, ceil(pi/(2 theta)) + 1] (one full rotation);
    if nothing there achieves the tolerance it extends to 4·ceil(pi/(2 theta)),
    where later revolutions can land closer to 1/2. With no achieving m at
    all, the plan carries the gap-minimising m and achieved=False.
    """
    if not 0.0 < theta < math.pi / 2:
        raise ValidationError(f"theta must lie in (0, pi/2), got {theta!r}")
    if not 0.0 < epsilon < 0.5:
        raise ValidationError(f"epsilon must lie in (0, 0.5), got {epsilon!r}")
    base_bound = math.ceil(math.pi / (2 * theta)) + 1
    extended_bound = 4 * math.ceil(math.pi / (2 * theta))

    best_m = 0
    best_gap = math.inf
    achieved_m = None
    for m in range(extended_bound + 1):
        gap = abs(predict_probability(theta, m) - 0.5)
        if gap < best_gap - 1e-12:  # roundoff-level ties keep the smaller m
            best_m, best_gap = m, gap
        if gap <= epsilon:
            achieved_m = m
            break

    if achieved_m is not None:
        m = achieved_m
        search_bound = base_bound if achieved_m <= base_bound else extended_bound
        achieved = True
    else:
        m = best_m
        search_bound = extended_bound
        achieved = False

    predicted = predict_probability(theta, m)
    return AmplificationPlan(
        theta=theta,
        initial_mass=math.sin(theta) ** 2,
        m=m,
        predicted_mass=predicted,
        achieved=achieved,
        search_bound=search_bound,
        residual_gap=abs(predicted - 0.5),
        closed_form_m=printed_iteration_formula(theta, epsilon),
    )


def apply_grover_iterations(
    psi: StateVector, mask: np.ndarray, m: int, method: str = "auto"
) -> StateVector:
    """Apply Q^m to psi for the projector selecting `mask`.

    method: "dense" materialises Q and applies it m times; "kernel" runs the
    two reflections as vector sweeps; "auto" picks dense for small registers
    and the sweep beyond DENSE_QUBIT_LIMIT qubits. Both routes compute the
    same operator product.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.size != psi.dim:
        raise ValidationError(f"mask length {mask.size} != state dim {psi.dim}")
    if m < 0:
        raise ValidationError(f"iteration count must be >= 0, got {m}")
    _check_mass(subspace_mass(psi, mask))
    if method == "auto":
        method = "dense" if psi.num_qubits <= DENSE_QUBIT_LIMIT else "kernel"
    if method == "dense":
        p = MatrixOperator(np.diag(mask.astype(np.complex128)), kind="projector")
        q = grover_operator(psi, p).matrix
        amps = psi.amplitudes
        for _ in range(m):
            amps = q @ amps
        return StateVector(amps)
    if method == "kernel":
        amps = grover_sweep(psi.amplitudes, mask.astype(np.uint8), psi.amplitudes, m)
        return StateVector(amps)
    raise ValidationError(f"unknown method {method!r}")


def repair_parity(
    psi: StateVector,
    spec: PartitionSpec,
    epsilon: float,
    method: str = "auto",
    tolerance: float = TOL_RESULT,
) -> tuple[StateVector, ParityReport, AmplificationPlan]:
    """Amplify the protected-subspace mass toward 1/2 within epsilon.

    Returns the repaired state, its parity report, and the plan used. The
    repaired state's measured mass is checked against the closed-form
    prediction; disagreement beyond `tolerance` raises InvariantViolation.
    """
    if spec.arity != 2:
        raise ValidationError(
            f"repair needs a two-subspace split (one clause), got arity {spec.arity}"
        )
    mask = spec.designated_mask(psi.num_qubits)
    a = _check_mass(subspace_mass(psi, mask))
    plan = find_parity_iterations(math.asin(math.sqrt(a)), epsilon)
    repaired = apply_grover_iterations(psi, mask, plan.m, method=method)
    measured = subspace_mass(repaired, mask)
    if abs(measured - plan.predicted_mass) > tolerance:
        raise InvariantViolation(
            f"repaired mass {measured!r} disagrees with prediction {plan.predicted_mass!r}"
        )
    report = statistical_parity_probs(repaired, spec, epsilon)
    return repaired, report, plan


def cross_partition_disparity(
    psi: StateVector,
    repaired_on: PartitionSpec,
    others: Sequence[PartitionSpec],
    epsilon: float = 0.0,
) -> list[ParityReport]:
    """Parity reports of an (already repaired) state across other partitions.

    Equalising one partition gives no guarantee for any other; this is the
    diagnostic that quantifies the side effects.
    """
    repaired_on.validate_for(psi.num_qubits)
    return [statistical_parity_probs(psi, spec, epsilon) for spec in others]
