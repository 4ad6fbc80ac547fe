"""End-to-end audit pipeline: CSV ingestion, ordinal binarisation, state
preparation, parity repair, seeded sampling, and machine-readable reports.

Reports are single JSON documents with sorted keys and floats rendered at 17
significant digits, so identical inputs produce byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from . import __version__
from .amplification import AmplificationPlan, repair_parity
from .encoding import FeatureRecord, ScoreTable, prepare_scored_state
from .errors import InputError, InvariantViolation
from .fairness import (
    ParityReport,
    PartitionSpec,
    disparate_impact_ratio,
    statistical_parity_probs,
)
from .linalg import MAX_STATE_QUBITS, StateVector
from .measurement import SAMPLER_ID, sample_basis
from ._kernels import BACKEND

DEFAULT_TOLERANCE = 1e-9
TOLERANCE_ENV_VAR = "QFAIR_TOLERANCE"


def composed_tolerance() -> float:
    """The 1e-9 composed-result tolerance, overridable via QFAIR_TOLERANCE."""
    raw = os.environ.get(TOLERANCE_ENV_VAR)
    if raw is None:
        return DEFAULT_TOLERANCE
    try:
        value = float(raw)
    except ValueError:
        raise InputError(f"{TOLERANCE_ENV_VAR}={raw!r} is not a number") from None
    if value <= 0:
        raise InputError(f"{TOLERANCE_ENV_VAR} must be positive, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# schema and ingestion


@dataclass(frozen=True)
class DatasetSchema:
    """How to read a CSV: which column is protected, which holds scores, and
    how ordinal columns binarise into one-hot interval indicators."""

    protected: str
    columns: tuple[str, ...] | None = None
    bins: dict[str, tuple[float, ...]] = field(default_factory=dict)
    score_column: str | None = None

    def __post_init__(self):
        if not self.protected:
            raise InputError("schema needs a protected column name")
        bins = {}
        for column, breakpoints in self.bins.items():
            pts = tuple(float(b) for b in breakpoints)
            if not pts:
                raise InputError(f"empty breakpoint list for column {column!r}")
            if list(pts) != sorted(pts) or len(set(pts)) != len(pts):
                raise InputError(f"breakpoints for {column!r} must be strictly increasing")
            bins[str(column)] = pts
        if self.protected in bins:
            raise InputError("the protected column must be binary in the raw data, not binned")
        object.__setattr__(self, "bins", bins)
        if self.columns is not None:
            object.__setattr__(self, "columns", tuple(str(c) for c in self.columns))

    @classmethod
    def from_json_file(cls, path: str | Path) -> "DatasetSchema":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read schema {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise InputError("schema JSON must be an object")
        known = {"protected", "columns", "bins", "score_column"}
        unknown = set(raw) - known
        if unknown:
            raise InputError(f"unknown schema keys: {sorted(unknown)}")
        if "protected" not in raw:
            raise InputError("schema is missing the 'protected' key")
        return cls(
            protected=raw["protected"],
            columns=tuple(raw["columns"]) if raw.get("columns") else None,
            bins={k: tuple(v) for k, v in raw.get("bins", {}).items()},
            score_column=raw.get("score_column"),
        )

    def to_dict(self) -> dict:
        return {
            "protected": self.protected,
            "columns": list(self.columns) if self.columns else None,
            "bins": {k: list(v) for k, v in self.bins.items()},
            "score_column": self.score_column,
        }


def _interval_bits(value: float, breakpoints: tuple[float, ...]) -> list[int]:
    """One-hot indicators over the k+1 intervals cut by k breakpoints."""
    bits = [0] * (len(breakpoints) + 1)
    position = sum(value >= b for b in breakpoints)
    bits[position] = 1
    return bits


def _interval_names(column: str, breakpoints: tuple[float, ...]) -> list[str]:
    edges = ["-inf", *(format(b, "g") for b in breakpoints), "inf"]
    return [f"{column}[{lo},{hi})" for lo, hi in zip(edges[:-1], edges[1:])]


@dataclass(frozen=True)
class IngestedDataset:
    """Parsed dataset: one record per row plus the aggregated score table."""

    records: tuple[FeatureRecord, ...]
    scores: ScoreTable
    feature_names: tuple[str, ...]
    num_qubits: int
    digest: str
    protected_spec: PartitionSpec


def _parse_number(text: str, where: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise InputError(f"{where}: {text!r} is not a number") from None


def ingest(csv_path: str | Path, schema: DatasetSchema) -> IngestedDataset:
    """Read a header+rows CSV into feature records and a score table.

    The protected column becomes qubit 1; remaining feature columns follow in
    header (or schema-given) order, with binned columns expanded in place.
    Rows with identical feature combinations aggregate by summing scores
    (default score 1 per row).
    """
    path = Path(csv_path)
    try:
        content = path.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    lines = [line for line in content.decode("utf-8").splitlines() if line.strip()]
    if not lines:
        raise InputError(f"{path}: file is empty")
    header = [h.strip() for h in lines[0].split(",")]
    if len(set(header)) != len(header):
        raise InputError(f"{path}: duplicate column names in header")

    if schema.protected not in header:
        raise InputError(f"{path}: protected column {schema.protected!r} not found")
    if schema.score_column is not None and schema.score_column not in header:
        raise InputError(f"{path}: score column {schema.score_column!r} not found")
    feature_columns = list(schema.columns) if schema.columns else [
        c for c in header if c != schema.score_column
    ]
    if schema.score_column in feature_columns:
        raise InputError(f"score column {schema.score_column!r} cannot also be a feature column")
    for column in feature_columns:
        if column not in header:
            raise InputError(f"{path}: schema column {column!r} not found")
    if schema.protected not in feature_columns:
        raise InputError(f"protected column {schema.protected!r} absent from feature columns")
    # Protected column first: it becomes qubit 1.
    feature_columns = [schema.protected] + [c for c in feature_columns if c != schema.protected]

    feature_names: list[str] = []
    for column in feature_columns:
        if column in schema.bins:
            feature_names.extend(_interval_names(column, schema.bins[column]))
        else:
            feature_names.append(column)
    if len(feature_names) > MAX_STATE_QUBITS:
        raise InputError(
            f"{len(feature_names)} encoded features exceed the {MAX_STATE_QUBITS}-qubit limit"
        )

    column_index = {name: i for i, name in enumerate(header)}
    records: list[FeatureRecord] = []
    row_scores: list[float] = []
    for row_number, line in enumerate(lines[1:], start=2):
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != len(header):
            raise InputError(f"{path}:{row_number}: expected {len(header)} cells, got {len(cells)}")
        bits: list[int] = []
        for column in feature_columns:
            value = _parse_number(cells[column_index[column]], f"{path}:{row_number} column {column!r}")
            if column in schema.bins:
                bits.extend(_interval_bits(value, schema.bins[column]))
            elif value in (0.0, 1.0):
                bits.append(int(value))
            else:
                raise InputError(
                    f"{path}:{row_number}: column {column!r} must be binary after binning, got {value!r}"
                )
        score = 1.0
        if schema.score_column is not None:
            score = _parse_number(
                cells[column_index[schema.score_column]],
                f"{path}:{row_number} column {schema.score_column!r}",
            )
            if not math.isfinite(score) or score < 0:
                raise InputError(f"{path}:{row_number}: scores must be finite and >= 0")
        records.append(FeatureRecord(bits=tuple(bits), index=row_number - 2))
        row_scores.append(score)

    if not records:
        raise InputError(f"{path}: no data rows")
    return IngestedDataset(
        records=tuple(records),
        scores=ScoreTable.from_records(records, row_scores),
        feature_names=tuple(feature_names),
        num_qubits=len(feature_names),
        digest=hashlib.sha256(content).hexdigest(),
        protected_spec=PartitionSpec(clauses=((1, 1),)),
    )


# ---------------------------------------------------------------------------
# audit orchestration


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    """Everything a rerun needs to reproduce the audit bit-for-bit."""

    dataset_digest: str
    schema: dict | None
    feature_names: tuple[str, ...]
    epsilon: float
    shots: int
    seed: int
    tolerance: float
    pre_repair: ParityReport
    pre_disparate_impact: float
    plan: AmplificationPlan | None
    post_repair: ParityReport | None
    post_disparate_impact: float | None
    cross_partition: dict[str, ParityReport]
    histograms: dict[str, dict[str, int]]
    sampled_parity: dict[str, dict[str, float]]
    achieved: bool
    note: str | None

    def to_dict(self) -> dict:
        return {
            "tool": {"name": "qfair", "version": __version__, "kernel_backend": BACKEND},
            "sampler": SAMPLER_ID,
            "dataset_digest": self.dataset_digest,
            "schema": self.schema,
            "feature_names": list(self.feature_names),
            "epsilon": self.epsilon,
            "shots": self.shots,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "pre_repair": self.pre_repair.to_dict(),
            "pre_disparate_impact": self.pre_disparate_impact,
            "plan": self.plan.to_dict() if self.plan else None,
            "post_repair": self.post_repair.to_dict() if self.post_repair else None,
            "post_disparate_impact": self.post_disparate_impact,
            "cross_partition": {k: r.to_dict() for k, r in self.cross_partition.items()},
            "histograms": self.histograms,
            "sampled_parity": self.sampled_parity,
            "achieved": self.achieved,
            "note": self.note,
        }

    def to_json(self) -> str:
        return render_json(self.to_dict())


def _sampled_parity(
    histogram: Mapping[str, int], shots: int, spec: PartitionSpec
) -> dict[str, float]:
    """Empirical protected-group mass and gap from a basis histogram."""
    def in_group(label: str) -> bool:
        return all(label[q - 1] == str(v) for q, v in spec.clauses)

    mass = sum(count for label, count in histogram.items() if in_group(label)) / shots
    return {"protected_mass": mass, "gap": abs(2.0 * mass - 1.0)}


def run_audit(
    records: Sequence[FeatureRecord],
    scores: ScoreTable,
    spec: PartitionSpec,
    epsilon: float,
    shots: int,
    seed: int,
    repair: bool = True,
    feature_names: Sequence[str] | None = None,
    digest: str = "",
    schema: DatasetSchema | None = None,
    tolerance: float | None = None,
) -> ExperimentReport:
    """Prepare the score-weighted state, audit parity, optionally repair it,
    and assemble the deterministic report.

    The pre-repair histogram is seeded with `seed`, the post-repair one with
    `seed + 1`, so the two draws are independent but reproducible.
    """
    if not records:
        raise InputError("no records to audit")
    widths = {r.num_bits for r in records}
    if len(widths) != 1:
        raise InputError(f"records have mixed widths: {sorted(widths)}")
    n = widths.pop()
    spec.validate_for(n)
    if tolerance is None:
        tolerance = composed_tolerance()

    psi = prepare_scored_state(scores, n)
    pre_report = statistical_parity_probs(psi, spec, epsilon)
    pre_di = disparate_impact_ratio(pre_report) if spec.arity == 2 else math.nan

    plan = None
    post_report = None
    post_di = None
    note = None
    repaired: StateVector = psi
    if repair:
        repaired, post_report, plan = repair_parity(psi, spec, epsilon, tolerance=tolerance)
        post_di = disparate_impact_ratio(post_report)
        if plan.achieved and post_report.gap > pre_report.gap + tolerance:
            raise InvariantViolation(
                f"post-repair gap {post_report.gap!r} exceeds pre-repair gap {pre_report.gap!r}"
            )
        if not plan.achieved:
            note = (
                f"epsilon-parity not reachable for theta={plan.theta!r}: best-effort m={plan.m} "
                f"leaves residual gap {plan.residual_gap!r} (searched m in [0, {plan.search_bound}])"
            )

    clause_qubits = {q for q, _ in spec.clauses}
    cross = {
        f"x{q}": statistical_parity_probs(repaired, PartitionSpec(clauses=((q, 1),)), epsilon)
        for q in range(1, n + 1)
        if q not in clause_qubits
    }

    histograms = {"pre_repair": sample_basis(psi, shots, seed)}
    sampled = {}
    if spec.arity == 2:
        sampled["pre_repair"] = _sampled_parity(histograms["pre_repair"], shots, spec)
    if repair:
        histograms["post_repair"] = sample_basis(repaired, shots, seed + 1)
        sampled["post_repair"] = _sampled_parity(histograms["post_repair"], shots, spec)

    achieved = plan.achieved if plan is not None else pre_report.satisfied
    return ExperimentReport(
        dataset_digest=digest,
        schema=schema.to_dict() if schema else None,
        feature_names=tuple(feature_names) if feature_names else tuple(f"x{i+1}" for i in range(n)),
        epsilon=epsilon,
        shots=shots,
        seed=seed,
        tolerance=tolerance,
        pre_repair=pre_report,
        pre_disparate_impact=pre_di,
        plan=plan,
        post_repair=post_report,
        post_disparate_impact=post_di,
        cross_partition=cross,
        histograms=histograms,
        sampled_parity=sampled,
        achieved=achieved,
        note=note,
    )


def audit_csv(
    csv_path: str | Path,
    schema: DatasetSchema,
    epsilon: float,
    shots: int,
    seed: int,
    repair: bool = True,
) -> ExperimentReport:
    """Convenience wrapper: ingest then run the audit/repair pipeline."""
    data = ingest(csv_path, schema)
    return run_audit(
        records=data.records,
        scores=data.scores,
        spec=data.protected_spec,
        epsilon=epsilon,
        shots=shots,
        seed=seed,
        repair=repair,
        feature_names=data.feature_names,
        digest=data.digest,
        schema=schema,
    )


# ---------------------------------------------------------------------------
# deterministic JSON rendering


def _format_float(value: float) -> str:
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    text = format(value, ".17g")
    if not any(c in text for c in ".eE"):
        text += ".0"  # keep floats recognisable as floats
    return text


def _render(value, pieces: list[str], indent: str):
    if value is None:
        pieces.append("null")
    elif value is True or value is False:
        pieces.append("true" if value else "false")
    elif isinstance(value, str):
        pieces.append(json.dumps(value, ensure_ascii=True))
    elif isinstance(value, int):
        pieces.append(str(value))
    elif isinstance(value, float):
        pieces.append(_format_float(value))
    elif isinstance(value, Mapping):
        if not value:
            pieces.append("{}")
            return
        inner = indent + "  "
        pieces.append("{\n")
        for i, key in enumerate(sorted(value)):
            if not isinstance(key, str):
                raise InputError(f"report keys must be strings, got {key!r}")
            pieces.append(f"{inner}{json.dumps(key, ensure_ascii=True)}: ")
            _render(value[key], pieces, inner)
            pieces.append(",\n" if i < len(value) - 1 else "\n")
        pieces.append(indent + "}")
    elif isinstance(value, (list, tuple)):
        if not value:
            pieces.append("[]")
            return
        inner = indent + "  "
        pieces.append("[\n")
        for i, item in enumerate(value):
            pieces.append(inner)
            _render(item, pieces, inner)
            pieces.append(",\n" if i < len(value) - 1 else "\n")
        pieces.append(indent + "]")
    else:
        raise InputError(f"cannot render {type(value).__name__} into a report")


def render_json(value) -> str:
    """Render with sorted keys and 17-significant-digit floats; the output
    round-trips byte-identically through json.loads + render_json."""
    pieces: list[str] = []
    _render(value, pieces, "")
    pieces.append("\n")
    return "".join(pieces)
