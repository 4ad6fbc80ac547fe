"""Group and individual fairness criteria over quantum states.

Group criteria compare the probability mass a state places in the subspaces
induced by protected attributes (max pairwise gap, disparate-impact ratio).
Individual criteria bound how far an algorithm may separate similar inputs,
as a Lipschitz condition in a chosen state metric, in relative entropy, or
in the outcome distributions of a pair of POVMs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import InitVar, dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    NonCommutingMeasurementsError,
    ValidationError,
)
from .linalg import (
    TOL_STRUCT,
    DensityMatrix,
    MatrixOperator,
    Povm,
    StateVector,
    commutator_norm,
    dagger,
    evolve_density,
)
from .measurement import OutcomeDistribution, born_probabilities
from .metrics import MetricChoice, state_distance

# Two inputs closer than this are treated as the same individual; their
# outputs must then coincide within RESULT_SLACK instead of forming a ratio.
COINCIDENT_TOL = 1e-12
RESULT_SLACK = 1e-9

CONVENTIONS = ("evolve", "adjoint")  # U rho U†  vs  U† rho U


@dataclass(frozen=True, eq=False)
class PartitionSpec:
    """Protected-attribute clauses (qubit index, required value).

    The clauses split the Hilbert space into one subspace per assignment of
    values to the clause qubits (2**k cells for k clauses); the cell matching
    the required values is the designated / protected one. Qubit 1 is the
    most significant bit.
    """

    clauses: tuple[tuple[int, int], ...]

    def __post_init__(self):
        clauses = tuple((int(q), int(v)) for q, v in self.clauses)
        qubits = [q for q, _ in clauses]
        if len(set(qubits)) != len(qubits):
            raise ValidationError("clause qubits must be distinct")
        if any(q < 1 for q in qubits):
            raise ValidationError("qubit indices are 1-based")
        if any(v not in (0, 1) for _, v in clauses):
            raise ValidationError("clause values must be 0 or 1")
        object.__setattr__(self, "clauses", clauses)

    @property
    def arity(self) -> int:
        """Number of induced subspaces."""
        return 2 ** len(self.clauses) if self.clauses else 1

    def validate_for(self, num_qubits: int):
        for q, _ in self.clauses:
            if q > num_qubits:
                raise ValidationError(f"clause qubit {q} out of range for {num_qubits} qubits")

    def cells(self) -> list[tuple[str, tuple[tuple[int, int], ...]]]:
        """(label, assignment) per induced subspace, designated cell first."""
        if not self.clauses:
            return [("all", ())]
        qubits = [q for q, _ in self.clauses]
        designated = tuple(v for _, v in self.clauses)
        assignments = [designated]
        for bits in range(2 ** len(qubits)):
            values = tuple((bits >> (len(qubits) - 1 - i)) & 1 for i in range(len(qubits)))
            if values != designated:
                assignments.append(values)
        out = []
        for values in assignments:
            assignment = tuple(zip(qubits, values))
            label = ",".join(f"x{q}={v}" for q, v in assignment)
            out.append((label, assignment))
        return out

    def cell_masks(self, num_qubits: int) -> list[tuple[str, np.ndarray]]:
        """(label, boolean index mask) per induced subspace."""
        self.validate_for(num_qubits)
        indices = np.arange(2**num_qubits)
        out = []
        for label, assignment in self.cells():
            mask = np.ones(indices.size, dtype=bool)
            for q, v in assignment:
                mask &= ((indices >> (num_qubits - q)) & 1) == v
            out.append((label, mask))
        return out

    def designated_mask(self, num_qubits: int) -> np.ndarray:
        """Mask of basis states matching every clause."""
        return self.cell_masks(num_qubits)[0][1]

    def designated_label(self) -> str:
        return self.cells()[0][0]


def partition_povm(spec: PartitionSpec, num_qubits: int) -> Povm:
    """Projective POVM whose outcomes are the partition cells."""
    effects = []
    labels = []
    for label, mask in spec.cell_masks(num_qubits):
        effects.append(MatrixOperator(np.diag(mask.astype(np.complex128)), kind="projector"))
        labels.append(label)
    return Povm(effects=tuple(effects), labels=tuple(labels))


@dataclass(frozen=True, eq=False)
class ParityReport:
    """Subspace probabilities with their max pairwise gap versus a tolerance."""

    probabilities: dict[str, float]
    gap: float
    epsilon: float
    satisfied: bool
    atol: InitVar[float] = TOL_STRUCT

    def __post_init__(self, atol: float):
        probs = {str(k): float(v) for k, v in self.probabilities.items()}
        total = sum(probs.values())
        if abs(total - 1.0) > atol:
            raise ValidationError(f"subspace probabilities sum to {total!r}, expected 1")
        gap = max(probs.values()) - min(probs.values())
        if abs(gap - self.gap) > atol:
            raise ValidationError("gap does not equal max - min of the probabilities")
        object.__setattr__(self, "probabilities", probs)

    def to_dict(self) -> dict:
        return {
            "probabilities": dict(self.probabilities),
            "gap": self.gap,
            "epsilon": self.epsilon,
            "satisfied": self.satisfied,
        }


def quantum_fairness_gap(
    state: StateVector | DensityMatrix, povm: Povm
) -> tuple[float, OutcomeDistribution]:
    """Max pairwise difference among POVM outcome probabilities.

    Zero gap means the state is equally likely to be found in every outcome
    subspace; callers compare the gap to their own tolerance.
    """
    dist = born_probabilities(state, povm)
    gap = float(np.max(dist.probabilities) - np.min(dist.probabilities))
    return gap, dist


def statistical_parity_probs(
    psi: StateVector, spec: PartitionSpec, epsilon: float = 0.0
) -> ParityReport:
    """Probability mass per partition cell, as squared-amplitude sums."""
    weights = psi.probabilities()
    probs = {label: float(np.sum(weights[mask])) for label, mask in spec.cell_masks(psi.num_qubits)}
    gap = max(probs.values()) - min(probs.values())
    return ParityReport(probabilities=probs, gap=gap, epsilon=epsilon, satisfied=gap <= epsilon)


def disparate_impact_ratio(report: ParityReport | Sequence[float]) -> float:
    """min/max ratio of two group probabilities; 1.0 is perfect parity.

    Takes a two-subspace ParityReport or a bare pair of rates (useful for
    conditional probabilities that need not sum to 1). The classical
    screening rule compares the ratio against a threshold such as 0.8.
    Returns +inf (with a warning) if the larger probability vanishes.
    """
    values = list(report.probabilities.values()) if isinstance(report, ParityReport) else list(report)
    if len(values) != 2:
        raise ValidationError(f"disparate impact needs 2 subspaces, got {len(values)}")
    low, high = sorted(float(v) for v in values)
    if low < 0:
        raise ValidationError(f"group probabilities must be >= 0, got {low!r}")
    if high <= 1e-12:
        warnings.warn("disparate impact undefined: both group probabilities are zero")
        return math.inf
    return low / high


@dataclass(frozen=True, eq=False)
class LipschitzPair:
    """One input pair's distances under the checked condition."""

    i: int
    j: int
    input_distance: float
    output_distance: float
    ratio: float | None
    satisfied: bool
    note: str | None = None


@dataclass(frozen=True, eq=False)
class LipschitzReport:
    """Per-pair distances, the bound K, and the overall verdict."""

    pairs: tuple[LipschitzPair, ...]
    k: float
    variant: str  # metric | entropy | povm
    metric: MetricChoice | None
    convention: str
    satisfied: bool

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "variant": self.variant,
            "metric": self.metric.value if self.metric else None,
            "convention": self.convention,
            "satisfied": self.satisfied,
            "pairs": [
                {
                    "i": p.i,
                    "j": p.j,
                    "input_distance": p.input_distance,
                    "output_distance": p.output_distance,
                    "ratio": p.ratio,
                    "satisfied": p.satisfied,
                    "note": p.note,
                }
                for p in self.pairs
            ],
        }


def _check_lipschitz_args(inputs, algorithm: MatrixOperator, k: float, convention: str):
    if algorithm.kind != "unitary":
        raise ValidationError("the audited algorithm must be a unitary operator")
    if not 0 < k <= 1:
        raise ValidationError(f"K must satisfy 0 < K <= 1, got {k!r}")
    if len(inputs) < 2:
        raise ValidationError("need at least two input states")
    if convention not in CONVENTIONS:
        raise ValidationError(f"convention must be one of {CONVENTIONS}, got {convention!r}")


def _evolve_all(
    inputs: Sequence[DensityMatrix], algorithm: MatrixOperator, convention: str
) -> list[DensityMatrix]:
    u = algorithm if convention == "evolve" else dagger(algorithm)
    return [evolve_density(u, rho) for rho in inputs]


def _pair_verdict(d_in: float, d_out: float, k: float) -> tuple[float | None, bool, str | None]:
    if d_in <= COINCIDENT_TOL:
        # 0/0 guard: coincident inputs must stay coincident.
        ok = d_out <= RESULT_SLACK
        return None, ok, "coincident inputs: output distance checked directly"
    if math.isinf(d_in) or math.isinf(d_out):
        ok = d_out <= k * d_in + RESULT_SLACK
        return None, ok, "infinite distance: ratio not defined"
    return d_out / d_in, d_out <= k * d_in + RESULT_SLACK, None


def lipschitz_check_metric(
    inputs: Sequence[DensityMatrix],
    algorithm: MatrixOperator,
    k: float,
    metric: MetricChoice,
    convention: str = "evolve",
) -> LipschitzReport:
    """Check D(out_i, out_j) <= K * D(in_i, in_j) for all unordered pairs."""
    _check_lipschitz_args(inputs, algorithm, k, convention)
    outputs = _evolve_all(inputs, algorithm, convention)
    pairs = []
    for i in range(len(inputs)):
        for j in range(i + 1, len(inputs)):
            d_in = state_distance(inputs[i], inputs[j], metric)
            d_out = state_distance(outputs[i], outputs[j], metric)
            ratio, ok, note = _pair_verdict(d_in, d_out, k)
            pairs.append(LipschitzPair(i, j, d_in, d_out, ratio, ok, note))
    return LipschitzReport(
        pairs=tuple(pairs),
        k=k,
        variant="metric",
        metric=metric,
        convention=convention,
        satisfied=all(p.satisfied for p in pairs),
    )


def lipschitz_check_entropy(
    inputs: Sequence[DensityMatrix],
    algorithm: MatrixOperator,
    k: float,
    convention: str = "evolve",
) -> LipschitzReport:
    """Relative-entropy form: input-side S(in_i || in_j) bounded by K times the
    output-side S(out_i || out_j).

    Note the orientation: the input quantity sits on the small side of the
    inequality here, the reverse of the metric form. Pairs where both sides
    are infinite (mutual support violations) are recorded but excluded from
    the verdict.
    """
    _check_lipschitz_args(inputs, algorithm, k, convention)
    outputs = _evolve_all(inputs, algorithm, convention)
    pairs = []
    verdicts = []
    for i in range(len(inputs)):
        for j in range(i + 1, len(inputs)):
            s_in = state_distance(inputs[i], inputs[j], MetricChoice.RELATIVE_ENTROPY)
            s_out = state_distance(outputs[i], outputs[j], MetricChoice.RELATIVE_ENTROPY)
            if math.isinf(s_in) and math.isinf(s_out):
                pairs.append(
                    LipschitzPair(
                        i, j, s_in, s_out, None, True,
                        "excluded: support violation on both sides",
                    )
                )
                continue
            if s_in <= COINCIDENT_TOL:
                ok = s_out <= RESULT_SLACK
                note = "coincident inputs: output entropy checked directly"
                ratio = None
            else:
                ok = s_in <= k * s_out + RESULT_SLACK
                ratio = None if math.isinf(s_out) else s_out / s_in
                note = None
            pairs.append(LipschitzPair(i, j, s_in, s_out, ratio, ok, note))
            verdicts.append(ok)
    return LipschitzReport(
        pairs=tuple(pairs),
        k=k,
        variant="entropy",
        metric=None,
        convention=convention,
        satisfied=all(verdicts) if verdicts else True,
    )


def lipschitz_check_povm(
    inputs: Sequence[DensityMatrix],
    algorithm: MatrixOperator,
    input_povm: Povm,
    output_povm: Povm,
    k: float,
    convention: str = "evolve",
) -> LipschitzReport:
    """Distribution form: total-variation distance of output-POVM statistics
    bounded by K times that of input-POVM statistics."""
    _check_lipschitz_args(inputs, algorithm, k, convention)
    outputs = _evolve_all(inputs, algorithm, convention)
    in_dists = [born_probabilities(rho, input_povm) for rho in inputs]
    out_dists = [born_probabilities(rho, output_povm) for rho in outputs]
    pairs = []
    for i in range(len(inputs)):
        for j in range(i + 1, len(inputs)):
            d_in = total_variation(in_dists[i], in_dists[j])
            d_out = total_variation(out_dists[i], out_dists[j])
            ratio, ok, note = _pair_verdict(d_in, d_out, k)
            pairs.append(LipschitzPair(i, j, d_in, d_out, ratio, ok, note))
    return LipschitzReport(
        pairs=tuple(pairs),
        k=k,
        variant="povm",
        metric=None,
        convention=convention,
        satisfied=all(p.satisfied for p in pairs),
    )


def total_variation(p: OutcomeDistribution, q: OutcomeDistribution) -> float:
    """Classical L1 distance between outcome distributions: half the sum of
    absolute probability differences."""
    if p.labels != q.labels:
        raise ValidationError("distributions must share the same outcome labels")
    return float(0.5 * np.sum(np.abs(p.probabilities - q.probabilities)))


def max_commutator_norm(povm_a: Povm, povm_b: Povm) -> float:
    """Largest spectral norm of [E_a, E_b] over all effect pairs."""
    if povm_a.dim != povm_b.dim:
        raise DimensionMismatch("POVMs act on different dimensions")
    return max(commutator_norm(a, b) for a in povm_a.effects for b in povm_b.effects)


def sequential_group_outcome_audit(
    psi: StateVector,
    group_povm: Povm,
    outcome_povm: Povm,
    commutator_tol: float = 1e-9,
) -> dict[tuple[str, str], float]:
    """Joint distribution of a group measurement followed by an outcome
    measurement (projective POVMs only).

    Non-commuting operators make the joint distribution order-dependent, so
    the audit refuses to run when the largest commutator norm exceeds
    `commutator_tol`; smaller but nonzero norms are surfaced as a warning.
    """
    for povm in (group_povm, outcome_povm):
        if any(e.kind != "projector" for e in povm.effects):
            raise ValidationError("sequential audits require projective POVMs")
    norm = max_commutator_norm(group_povm, outcome_povm)
    if norm > commutator_tol:
        raise NonCommutingMeasurementsError(
            f"group/outcome operators do not commute (norm {norm:.3e} > {commutator_tol:.0e})"
        )
    if norm > TOL_STRUCT:
        warnings.warn(f"group/outcome commutator norm {norm:.3e}; joint audit is order-sensitive")
    joint = {}
    for g_label, g in zip(group_povm.labels, group_povm.effects):
        projected = g.matrix @ psi.amplitudes
        for y_label, y in zip(outcome_povm.labels, outcome_povm.effects):
            v = y.matrix @ projected
            joint[(g_label, y_label)] = float(np.real(v.conj() @ v))
    return joint
