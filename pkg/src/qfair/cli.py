"""Command-line interface.

Subcommands:
  audit      parity audit of the encoded dataset (no repair)
  repair     audit, then amplitude-amplification repair to epsilon-parity
  lipschitz  individual-fairness check of the repair operator over the records
  metrics    state distances between the pre- and post-repair states

Exit codes: 0 success (criterion achieved), 2 parity/bound not achievable
(best-effort report still emitted), 3 input error, 4 numerical invariant
violation.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .amplification import (
    build_protected_projector,
    find_parity_iterations,
    grover_operator,
    repair_parity,
    subspace_mass,
)
from .encoding import basis_encode, prepare_scored_state
from .errors import InputError, InvariantViolation, QfairError
from .fairness import lipschitz_check_entropy, lipschitz_check_metric, statistical_parity_probs
from .linalg import MAX_MATRIX_QUBITS, MatrixOperator, pure_density
from .metrics import MetricChoice, fidelity, fidelity_angle, relative_entropy, trace_distance
from .pipeline import DatasetSchema, audit_csv, composed_tolerance, ingest, render_json

EXIT_OK = 0
EXIT_NOT_ACHIEVED = 2
EXIT_INPUT_ERROR = 3
EXIT_INVARIANT = 4

METRIC_NAMES = ("trace", "fidelity-angle", "relative-entropy")


class _Parser(argparse.ArgumentParser):
    # Usage errors must map to exit code 3, not argparse's default 2.
    def error(self, message):
        raise InputError(message)


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_schema(args) -> DatasetSchema:
    if args.schema:
        schema = DatasetSchema.from_json_file(args.schema)
        if args.protected and args.protected != schema.protected:
            schema = DatasetSchema(
                protected=args.protected,
                columns=schema.columns,
                bins=dict(schema.bins),
                score_column=schema.score_column,
            )
        return schema
    if not args.protected:
        raise InputError("provide --schema or --protected")
    return DatasetSchema(protected=args.protected)


def _cmd_audit(args) -> int:
    report = audit_csv(
        args.csv, _load_schema(args), args.epsilon, args.shots, args.seed, repair=False
    )
    _emit(report.to_json(), args.output)
    return EXIT_OK if report.achieved else EXIT_NOT_ACHIEVED


def _cmd_repair(args) -> int:
    report = audit_csv(
        args.csv, _load_schema(args), args.epsilon, args.shots, args.seed, repair=True
    )
    _emit(report.to_json(), args.output)
    return EXIT_OK if report.achieved else EXIT_NOT_ACHIEVED


def _repair_operator(data, epsilon: float) -> tuple[MatrixOperator, int]:
    """The dataset's repair unitary Q^m (identity when the plan picks m=0)."""
    if data.num_qubits > MAX_MATRIX_QUBITS:
        raise InputError(
            f"dense operators support up to {MAX_MATRIX_QUBITS} qubits, got {data.num_qubits}"
        )
    psi = prepare_scored_state(data.scores, data.num_qubits)
    mass = subspace_mass(psi, data.protected_spec.designated_mask(data.num_qubits))
    plan = find_parity_iterations(math.asin(math.sqrt(mass)), epsilon)
    q = grover_operator(psi, build_protected_projector(data.protected_spec, data.num_qubits))
    matrix = np.linalg.matrix_power(q.matrix, plan.m)
    return MatrixOperator(matrix, kind="unitary"), plan.m


def _cmd_lipschitz(args) -> int:
    data = ingest(args.csv, _load_schema(args))
    algorithm, m = _repair_operator(data, args.epsilon)
    unique_indices = sorted({r.basis_index() for r in data.records})
    record_map = {r.basis_index(): r for r in data.records}
    inputs = [pure_density(basis_encode(record_map[i])) for i in unique_indices]
    if len(inputs) < 2:
        raise InputError("lipschitz check needs at least two distinct records")
    metric = MetricChoice.from_cli_name(args.metric)
    if metric is MetricChoice.RELATIVE_ENTROPY:
        report = lipschitz_check_entropy(inputs, algorithm, args.k)
    else:
        report = lipschitz_check_metric(inputs, algorithm, args.k, metric)
    payload = report.to_dict()
    payload["algorithm"] = {"kind": "parity-repair", "iterations": m, "epsilon": args.epsilon}
    payload["records"] = unique_indices
    payload["dataset_digest"] = data.digest
    _emit(render_json(payload), args.output)
    return EXIT_OK if report.satisfied else EXIT_NOT_ACHIEVED


def _cmd_metrics(args) -> int:
    data = ingest(args.csv, _load_schema(args))
    if data.num_qubits > MAX_MATRIX_QUBITS:
        raise InputError(
            f"density matrices support up to {MAX_MATRIX_QUBITS} qubits, got {data.num_qubits}"
        )
    psi = prepare_scored_state(data.scores, data.num_qubits)
    repaired, post_report, plan = repair_parity(
        psi, data.protected_spec, args.epsilon, tolerance=composed_tolerance()
    )
    rho_pre = pure_density(psi)
    rho_post = pure_density(repaired)
    pre_report = statistical_parity_probs(psi, data.protected_spec, args.epsilon)
    payload = {
        "dataset_digest": data.digest,
        "plan": plan.to_dict(),
        "pre_repair_gap": pre_report.gap,
        "post_repair_gap": post_report.gap,
        "trace_distance": trace_distance(rho_pre, rho_post),
        "fidelity": fidelity(rho_pre, rho_post),
        "fidelity_angle": fidelity_angle(rho_pre, rho_post),
        "relative_entropy_pre_post": relative_entropy(rho_pre, rho_post),
        "relative_entropy_post_pre": relative_entropy(rho_post, rho_pre),
    }
    _emit(render_json(payload), args.output)
    return EXIT_OK


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("csv", help="dataset CSV (header row, comma-separated, no quoting)")
    sub.add_argument("--schema", help="dataset schema JSON")
    sub.add_argument("--protected", help="protected column name (overrides schema)")
    sub.add_argument("--epsilon", type=float, default=0.05, help="parity tolerance (default 0.05)")
    sub.add_argument("--output", help="write the JSON report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qfair", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    subparsers = parser.add_subparsers(dest="command", required=True)

    audit = subparsers.add_parser("audit", help="parity audit without repair")
    _add_common(audit)
    audit.add_argument("--shots", type=int, default=100_000, help="sample count (default 100000)")
    audit.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    audit.set_defaults(func=_cmd_audit)

    repair = subparsers.add_parser("repair", help="audit and repair to epsilon-parity")
    _add_common(repair)
    repair.add_argument("--shots", type=int, default=100_000, help="sample count (default 100000)")
    repair.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    repair.set_defaults(func=_cmd_repair)

    lipschitz = subparsers.add_parser(
        "lipschitz", help="Lipschitz check of the repair operator over the records"
    )
    _add_common(lipschitz)
    lipschitz.add_argument("--k", type=float, default=1.0, help="Lipschitz bound K in (0, 1]")
    lipschitz.add_argument(
        "--metric", choices=METRIC_NAMES, default="trace", help="distance measure"
    )
    lipschitz.set_defaults(func=_cmd_lipschitz)

    metrics = subparsers.add_parser(
        "metrics", help="state distances between pre- and post-repair states"
    )
    _add_common(metrics)
    metrics.set_defaults(func=_cmd_metrics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InvariantViolation as exc:
        print(f"qfair: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except QfairError as exc:
        print(f"qfair: error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
