"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line and asserting its runtime budget.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines as they complete.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np
import pytest

from qfair.amplification import (
    apply_grover_iterations,
    grover_operator,
    build_protected_projector,
    repair_parity,
    subspace_mass,
)
from qfair.cli import main
from qfair.encoding import FeatureRecord, ScoreTable, basis_encode, decode_basis_record, prepare_scored_state
from qfair.fairness import (
    PartitionSpec,
    disparate_impact_ratio,
    lipschitz_check_metric,
    partition_povm,
    quantum_fairness_gap,
    statistical_parity_probs,
)
from qfair.linalg import (
    DensityMatrix,
    MatrixOperator,
    Povm,
    StateVector,
    basis_state,
    evolve_density,
    identity,
    pure_density,
)
from qfair.measurement import basis_povm, born_probabilities, sample, sample_basis
from qfair.metrics import MetricChoice, fidelity, fidelity_angle, relative_entropy, trace_distance

from .conftest import random_density, random_state, random_unitary


@contextmanager
def criterion(number: int, description: str, budget_seconds: float):
    start = time.perf_counter()
    try:
        yield
    except Exception:
        print(f"ACCEPTANCE {number:02d} FAIL  {description}")
        raise
    elapsed = time.perf_counter() - start
    print(f"ACCEPTANCE {number:02d} PASS  {description}  [{elapsed:.2f}s]")
    assert elapsed < budget_seconds, f"criterion {number} took {elapsed:.2f}s (budget {budget_seconds}s)"


# ---------------------------------------------------------------------------
# shared corpus for criteria 3, 4 and 9


@dataclass
class RepairCase:
    psi: StateVector
    repaired: StateVector
    spec: PartitionSpec
    mask: np.ndarray
    theta: float
    plan: object
    brute_gaps: list[float]
    brute_first_achieving: int | None


EPSILON = 0.05


def _random_repair_instance(rng):
    while True:
        n = int(rng.integers(2, 7))
        psi = random_state(2**n, rng)
        spec = PartitionSpec(clauses=((int(rng.integers(1, n + 1)), int(rng.integers(0, 2))),))
        a = subspace_mass(psi, spec.designated_mask(n))
        if 0.02 <= a <= 0.98:
            return n, psi, spec, a


@pytest.fixture(scope="module")
def repair_corpus():
    rng = np.random.default_rng(424242)
    cases = []
    for _ in range(200):
        n, psi, spec, a = _random_repair_instance(rng)
        mask = spec.designated_mask(n)
        theta = math.asin(math.sqrt(a))
        repaired, _, plan = repair_parity(psi, spec, EPSILON)
        # independent oracle: direct scalar scan over the 4x range
        scan = 4 * math.ceil(math.pi / (2 * theta))
        gaps = [abs(math.sin((2 * m + 1) * theta) ** 2 - 0.5) for m in range(scan + 1)]
        achieving = [m for m, g in enumerate(gaps) if g <= EPSILON]
        cases.append(
            RepairCase(
                psi=psi,
                repaired=repaired,
                spec=spec,
                mask=mask,
                theta=theta,
                plan=plan,
                brute_gaps=gaps,
                brute_first_achieving=achieving[0] if achieving else None,
            )
        )
    return cases


def test_criterion_01_table_fidelity():
    rows = list(itertools.product((1, 0), repeat=3))
    basis_encode(FeatureRecord(bits=rows[0]))  # warm-up outside the timed region
    with criterion(1, "basis encoding reproduces all 8 feature rows exactly", 60.0):
        start = time.perf_counter()
        for bits in rows:
            psi = basis_encode(FeatureRecord(bits=bits))
            index = sum(b << (2 - k) for k, b in enumerate(bits))
            expected = np.zeros(8)
            expected[index] = 1.0
            assert np.array_equal(psi.amplitudes, expected)
            assert decode_basis_record(psi).bits == bits
        elapsed = time.perf_counter() - start
        assert elapsed < 1e-3, f"encode/decode loop took {elapsed*1e3:.3f} ms (budget 1 ms)"


def test_criterion_02_grover_closed_form_agreement():
    rng = np.random.default_rng(515151)
    with criterion(2, "Q^m mass equals sin²((2m+1)·theta) for 500 random instances", 30.0):
        for _ in range(500):
            n, psi, spec, a = _random_repair_instance(rng)
            theta = math.asin(math.sqrt(a))
            bound = math.ceil(math.pi / (2 * theta)) + 1
            mask = spec.designated_mask(n)
            q = grover_operator(psi, build_protected_projector(spec, n)).matrix
            amps = psi.amplitudes
            for m in range(bound + 1):
                mass = float(np.sum(np.abs(amps[mask]) ** 2))
                assert abs(mass - math.sin((2 * m + 1) * theta) ** 2) < 1e-9
                amps = q @ amps


def test_criterion_03_epsilon_parity_repair(repair_corpus):
    with criterion(3, "repair matches the brute-force oracle on 200 instances", 30.0):
        for case in repair_corpus:
            if case.brute_first_achieving is not None:
                assert case.plan.achieved
                assert case.plan.m == case.brute_first_achieving
                mass = subspace_mass(case.repaired, case.mask)
                assert abs(mass - 0.5) <= EPSILON + 1e-12
            else:
                assert not case.plan.achieved
                assert abs(case.plan.residual_gap - min(case.brute_gaps)) <= 1e-9


def test_criterion_04_conditional_distribution_preservation(repair_corpus):
    with criterion(4, "within-group rankings survive every repair", 30.0):
        for case in repair_corpus:
            before = case.psi.probabilities()
            after = case.repaired.probabilities()
            for cell in (case.mask, ~case.mask):
                b, a = before[cell], after[cell]
                assert np.max(np.abs(a / np.sum(a) - b / np.sum(b))) < 1e-9


def test_criterion_05_metric_suite():
    rng = np.random.default_rng(616161)
    with criterion(5, "metric invariances, pure-state identity, Klein, triangles", 20.0):
        for _ in range(200):
            rho, sigma = random_density(4, rng), random_density(4, rng)
            u = random_unitary(4, rng)
            rho_u, sigma_u = evolve_density(u, rho), evolve_density(u, sigma)
            assert abs(trace_distance(rho, sigma) - trace_distance(rho_u, sigma_u)) < 1e-9
            assert abs(fidelity(rho, sigma) - fidelity(rho_u, sigma_u)) < 1e-9
            assert abs(relative_entropy(rho, sigma) - relative_entropy(rho_u, sigma_u)) < 1e-9
            assert relative_entropy(rho, sigma) >= -1e-10  # Klein
        for _ in range(200):
            rho = pure_density(random_state(4, rng))
            sigma = pure_density(random_state(4, rng))
            d, f = trace_distance(rho, sigma), fidelity(rho, sigma)
            assert abs(d - math.sqrt(max(0.0, 1.0 - f * f))) < 1e-9
        for _ in range(200):
            a, b, c = (random_density(4, rng) for _ in range(3))
            assert trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-9
            assert fidelity_angle(a, c) <= fidelity_angle(a, b) + fidelity_angle(b, c) + 1e-9


def test_criterion_06_lipschitz_guarantee():
    rng = np.random.default_rng(717171)
    with criterion(6, "K=1 always satisfied for unitaries; K=0.5 identity violated", 20.0):
        for _ in range(200):
            inputs = [random_density(4, rng), random_density(4, rng)]
            algorithm = random_unitary(4, rng)
            for metric in (MetricChoice.TRACE, MetricChoice.FIDELITY_ANGLE):
                assert lipschitz_check_metric(inputs, algorithm, 1.0, metric).satisfied
        for _ in range(200):
            a, b = random_state(4, rng), random_state(4, rng)
            if abs(abs(np.vdot(a.amplitudes, b.amplitudes)) - 1.0) < 1e-6:
                continue  # coincident draws carry no ratio to violate
            report = lipschitz_check_metric(
                [pure_density(a), pure_density(b)], identity(4), 0.5, MetricChoice.TRACE
            )
            assert not report.satisfied


def test_criterion_07_definition_one_audit():
    with criterion(7, "maximally mixed state is exactly fair; basis state maximally unfair", 10.0):
        mixed = DensityMatrix(np.eye(8) / 8)
        for qubit in (1, 2, 3):
            povm = partition_povm(PartitionSpec(clauses=((qubit, 1),)), 3)
            gap, _ = quantum_fairness_gap(mixed, povm)
            assert gap < 1e-10
        # a hand-built equal-rank orthogonal split (even/odd parity of the index)
        parity_mask = np.array([bin(i).count("1") % 2 == 0 for i in range(8)])
        povm = Povm(
            effects=(
                MatrixOperator(np.diag(parity_mask.astype(complex)), kind="projector"),
                MatrixOperator(np.diag((~parity_mask).astype(complex)), kind="projector"),
            ),
            labels=("even", "odd"),
        )
        gap, _ = quantum_fairness_gap(mixed, povm)
        assert gap < 1e-10

        own = partition_povm(PartitionSpec(clauses=((1, 1),)), 3)
        gap, _ = quantum_fairness_gap(pure_density(basis_state(4, 3)), own)
        assert gap == 1.0


def test_criterion_08_measurement_statistics():
    rng = np.random.default_rng(818181)
    with criterion(8, "seeded sampling reproduces Born statistics and Bell correlations", 30.0):
        regression_states = [
            prepare_scored_state(ScoreTable({4: 1.0, 0: 3.0}), 3),
            StateVector(np.full(8, 1 / math.sqrt(8))),
            random_state(16, rng),
        ]
        for seed, psi in enumerate(regression_states, start=100):
            hist = sample_basis(psi, 100_000, seed)
            probs = psi.probabilities()
            tv = 0.5 * sum(
                abs(hist.get(format(i, f"0{psi.num_qubits}b"), 0) / 100_000 - p)
                for i, p in enumerate(probs)
            )
            assert tv < 0.01

        bell = StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2))
        hist = sample(bell, basis_povm(2), 100_000, seed=99)
        assert hist["01"] == 0 and hist["10"] == 0

        a = sample_basis(regression_states[0], 50_000, seed=12345)
        b = sample_basis(regression_states[0], 50_000, seed=12345)
        assert a == b
        assert json.dumps(a, sort_keys=True).encode() == json.dumps(b, sort_keys=True).encode()


def test_criterion_09_formula_comparison_log(repair_corpus):
    with criterion(9, "plans log both the search m and the printed closed form", 10.0):
        for case in repair_corpus:
            plan = case.plan
            assert isinstance(plan.closed_form_m, int)  # logged, not asserted against
            assert isinstance(plan.m, int)
            # the search result is what must be oracle-valid
            if case.brute_first_achieving is not None:
                assert plan.m == case.brute_first_achieving
            else:
                assert abs(plan.residual_gap - min(case.brute_gaps)) <= 1e-9


def test_criterion_10_end_to_end_cli(tmp_path):
    csv = tmp_path / "worked.csv"
    csv.write_text("x1,x2,x3,score\n1,0,0,1\n0,0,0,3\n")
    schema = tmp_path / "schema.json"
    schema.write_text(json.dumps({"protected": "x1", "score_column": "score"}))
    out_a, out_b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["repair", str(csv), "--schema", str(schema), "--epsilon", "0.05",
            "--shots", "10000", "--seed", "7"]

    with criterion(10, "worked-example CLI run matches module-level computation", 60.0):
        start = time.perf_counter()
        code = main(argv + ["--output", str(out_a)])
        elapsed = time.perf_counter() - start
        assert elapsed < 1.0, f"CLI run took {elapsed:.3f}s (budget 1 s)"
        assert code == 2  # theta = pi/6: 0.05-parity unattainable, best effort emitted

        report = json.loads(out_a.read_text())
        assert report["pre_repair"]["probabilities"]["x1=1"] == pytest.approx(0.25, abs=1e-12)
        assert report["pre_repair"]["probabilities"]["x1=0"] == pytest.approx(0.75, abs=1e-12)
        assert report["pre_disparate_impact"] == pytest.approx(1 / 3, abs=1e-12)

        # post-repair numbers must equal the module-level computation exactly
        psi = prepare_scored_state(ScoreTable({4: 1.0, 0: 3.0}), 3)
        spec = PartitionSpec(clauses=((1, 1),))
        repaired, post, plan = repair_parity(psi, spec, 0.05)
        assert report["plan"]["m"] == plan.m
        assert report["plan"]["theta"] == plan.theta
        assert report["plan"]["predicted_mass"] == plan.predicted_mass
        assert report["plan"]["closed_form_m"] == plan.closed_form_m
        assert report["post_repair"]["probabilities"]["x1=1"] == post.probabilities["x1=1"]
        assert report["post_repair"]["probabilities"]["x1=0"] == post.probabilities["x1=0"]
        assert report["post_disparate_impact"] == disparate_impact_ratio(post)
        assert report["achieved"] is False

        code_b = main(argv + ["--output", str(out_b)])
        assert code_b == 2
        assert out_a.read_bytes() == out_b.read_bytes()
