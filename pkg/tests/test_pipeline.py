"""CSV ingestion, audit orchestration, and deterministic report rendering."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from qfair.encoding import FeatureRecord
from qfair.errors import InputError
from qfair.fairness import PartitionSpec
from qfair.pipeline import (
    DatasetSchema,
    audit_csv,
    composed_tolerance,
    ingest,
    render_json,
    run_audit,
)

TABLE_CSV = """x1,x2,x3
1,1,1
1,1,0
1,0,1
1,0,0
0,1,1
0,1,0
0,0,1
0,0,0
"""

WORKED_CSV = """x1,x2,x3,score
1,0,0,1
0,0,0,3
"""


@pytest.fixture
def table_csv(tmp_path):
    path = tmp_path / "table.csv"
    path.write_text(TABLE_CSV)
    return path


@pytest.fixture
def worked_csv(tmp_path):
    path = tmp_path / "worked.csv"
    path.write_text(WORKED_CSV)
    return path


def schema(**kwargs):
    kwargs.setdefault("protected", "x1")
    return DatasetSchema(**kwargs)


class TestSchema:
    def test_from_json_file(self, tmp_path):
        path = tmp_path / "schema.json"
        path.write_text(json.dumps({"protected": "x1", "bins": {"age": [50, 70]}, "score_column": "w"}))
        loaded = DatasetSchema.from_json_file(path)
        assert loaded.protected == "x1"
        assert loaded.bins == {"age": (50.0, 70.0)}
        assert loaded.score_column == "w"

    def test_unknown_keys_rejected(self, tmp_path):
        path = tmp_path / "schema.json"
        path.write_text(json.dumps({"protected": "x1", "extra": 1}))
        with pytest.raises(InputError):
            DatasetSchema.from_json_file(path)

    def test_missing_protected_rejected(self, tmp_path):
        path = tmp_path / "schema.json"
        path.write_text(json.dumps({"bins": {}}))
        with pytest.raises(InputError):
            DatasetSchema.from_json_file(path)

    def test_binned_protected_rejected(self):
        with pytest.raises(InputError):
            schema(bins={"x1": (0.5,)})

    def test_unsorted_breakpoints_rejected(self):
        with pytest.raises(InputError):
            schema(bins={"age": (70, 50)})


class TestIngest:
    def test_table_rows_become_basis_records(self, table_csv):
        data = ingest(table_csv, schema())
        assert data.num_qubits == 3
        assert data.feature_names == ("x1", "x2", "x3")
        assert [r.bits for r in data.records] == [
            (1, 1, 1), (1, 1, 0), (1, 0, 1), (1, 0, 0),
            (0, 1, 1), (0, 1, 0), (0, 0, 1), (0, 0, 0),
        ]
        assert data.scores.entries == {i: 1.0 for i in range(8)}

    def test_protected_column_moves_to_front(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("a,s,b\n0,1,1\n1,0,0\n")
        data = ingest(path, schema(protected="s"))
        assert data.feature_names == ("s", "a", "b")
        assert data.records[0].bits == (1, 0, 1)

    def test_age_binning_one_hot(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("s,age\n1,50\n0,30\n1,80\n")
        data = ingest(path, schema(protected="s", bins={"age": (50, 70)}))
        assert data.feature_names == ("s", "age[-inf,50)", "age[50,70)", "age[70,inf)")
        assert data.records[0].bits == (1, 0, 1, 0)  # age 50 -> [50, 70)
        assert data.records[1].bits == (0, 1, 0, 0)
        assert data.records[2].bits == (1, 0, 0, 1)

    def test_scores_aggregate_duplicates(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("s,b,score\n1,0,2\n1,0,3\n0,1,1\n")
        data = ingest(path, schema(score_column="score", protected="s"))
        assert data.scores.entries == {2: 5.0, 1: 1.0}

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(InputError):
            ingest(path, schema())

    def test_header_only_rejected(self, tmp_path):
        path = tmp_path / "header.csv"
        path.write_text("x1,x2\n")
        with pytest.raises(InputError):
            ingest(path, schema())

    def test_missing_protected_column(self, table_csv):
        with pytest.raises(InputError):
            ingest(table_csv, schema(protected="nope"))

    def test_non_binary_value_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x1,x2\n1,2\n")
        with pytest.raises(InputError):
            ingest(path, schema())

    def test_too_many_features_rejected(self, tmp_path):
        cols = [f"c{i}" for i in range(21)]
        path = tmp_path / "wide.csv"
        path.write_text(",".join(["x1"] + cols) + "\n" + ",".join(["1"] + ["0"] * 21) + "\n")
        with pytest.raises(InputError):
            ingest(path, schema())

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError):
            ingest(tmp_path / "absent.csv", schema())


class TestRunAudit:
    def test_uniform_scores_are_already_fair(self, table_csv):
        report = audit_csv(table_csv, schema(), epsilon=0.05, shots=1000, seed=1)
        assert report.pre_repair.gap < 1e-12
        assert report.plan.m == 0
        assert report.achieved

    def test_worked_example_values(self, worked_csv):
        report = audit_csv(
            worked_csv, schema(score_column="score"), epsilon=0.05, shots=10_000, seed=3
        )
        assert report.pre_repair.probabilities["x1=1"] == pytest.approx(0.25, abs=1e-12)
        assert report.pre_repair.probabilities["x1=0"] == pytest.approx(0.75, abs=1e-12)
        assert report.pre_disparate_impact == pytest.approx(1 / 3, abs=1e-12)
        assert not report.achieved  # theta = pi/6 cannot land within 0.05
        assert report.plan.m == 0
        assert report.note is not None
        assert set(report.cross_partition) == {"x2", "x3"}

    def test_same_seed_is_byte_identical(self, worked_csv):
        kwargs = dict(epsilon=0.05, shots=5_000, seed=9)
        a = audit_csv(worked_csv, schema(score_column="score"), **kwargs)
        b = audit_csv(worked_csv, schema(score_column="score"), **kwargs)
        assert a.to_json() == b.to_json()

    def test_round_trip_is_byte_identical(self, worked_csv):
        report = audit_csv(worked_csv, schema(score_column="score"), 0.05, 5_000, 11)
        text = report.to_json()
        assert render_json(json.loads(text)) == text

    def test_sampled_gap_tracks_exact_gap(self, worked_csv):
        report = audit_csv(worked_csv, schema(score_column="score"), 0.05, 100_000, 17)
        sampled = report.sampled_parity["pre_repair"]["gap"]
        assert abs(sampled - report.pre_repair.gap) < 0.02

    def test_mixed_record_widths_rejected(self):
        records = [FeatureRecord(bits=(1, 0)), FeatureRecord(bits=(1, 0, 1))]
        from qfair.encoding import ScoreTable

        with pytest.raises(InputError):
            run_audit(records, ScoreTable({0: 1.0}), PartitionSpec(clauses=((1, 1),)), 0.05, 10, 0)

    def test_audit_without_repair(self, worked_csv):
        report = audit_csv(worked_csv, schema(score_column="score"), 0.05, 1_000, 5, repair=False)
        assert report.plan is None and report.post_repair is None
        assert not report.achieved
        assert "post_repair" not in report.histograms


class TestRenderJson:
    def test_float_formatting(self):
        assert render_json(1 / 3) == "0.33333333333333331\n"
        assert render_json(0.25) == "0.25\n"
        assert render_json(1.0) == "1.0\n"
        assert render_json(math.inf) == "Infinity\n"
        assert render_json(-math.inf) == "-Infinity\n"
        assert render_json(math.nan) == "NaN\n"

    def test_keys_are_sorted(self):
        text = render_json({"b": 1, "a": 2})
        assert text.index('"a"') < text.index('"b"')

    def test_round_trip_bytes(self):
        payload = {"z": [1.0, 0.1, {"k": True, "a": None}], "n": 7, "inf": math.inf}
        text = render_json(payload)
        assert render_json(json.loads(text)) == text

    def test_rejects_non_string_keys(self):
        with pytest.raises(InputError):
            render_json({1: "x"})

    def test_every_float_survives_a_cycle(self, rng):
        values = list(rng.normal(size=50) * 10.0 ** rng.integers(-12, 12, size=50))
        text = render_json(values)
        assert json.loads(text) == values


class TestToleranceEnv:
    def test_default(self, monkeypatch):
        monkeypatch.delenv("QFAIR_TOLERANCE", raising=False)
        assert composed_tolerance() == 1e-9

    def test_override(self, monkeypatch):
        monkeypatch.setenv("QFAIR_TOLERANCE", "1e-6")
        assert composed_tolerance() == 1e-6

    def test_invalid_value(self, monkeypatch):
        monkeypatch.setenv("QFAIR_TOLERANCE", "soon")
        with pytest.raises(InputError):
            composed_tolerance()

    def test_negative_value(self, monkeypatch):
        monkeypatch.setenv("QFAIR_TOLERANCE", "-1e-9")
        with pytest.raises(InputError):
            composed_tolerance()
