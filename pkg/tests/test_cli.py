from __future__ import annotations

import csv
import json

import pytest
from click.testing import CliRunner

from qdiag.cli import BENCH_COLUMNS, main

from conftest import TAB1_DOC


@pytest.fixture()
def instance_path(tmp_path):
    path = tmp_path / "example.dpi.json"
    path.write_text(json.dumps(TAB1_DOC))
    return str(path)


@pytest.fixture()
def runner():
    return CliRunner()


class TestDiagnose:
    def test_lists_all_golden_diagnoses(self, runner, instance_path):
        result = runner.invoke(main, ["diagnose", instance_path, "--max", "10"])
        assert result.exit_code == 0
        for expected in ("{c1, c2, c5}", "{c1, c3, c5}", "{c3, c4, c5}"):
            assert expected in result.output
        assert "3 diagnosis(es)" in result.output

    def test_missing_file_fails_cleanly(self, runner):
        result = runner.invoke(main, ["diagnose", "missing.json"])
        assert result.exit_code != 0
        assert "no such file" in result.output


class TestQuery:
    def test_enhanced_query_is_the_cost_preferred_core(self, runner, instance_path):
        result = runner.invoke(
            main,
            ["query", instance_path, "--qsm", "ent", "--qcm", "card", "--tm", "0.01", "--enhance"],
        )
        assert result.exit_code == 0
        assert "F -> H" in result.output
        assert "m=0.0817" in result.output

    def test_plain_query_reports_scores(self, runner, instance_path):
        result = runner.invoke(main, ["query", instance_path])
        assert result.exit_code == 0
        assert "p(true)=" in result.output
        assert "accepted by:" in result.output


class TestSession:
    def test_simulated_session_converges(self, runner, instance_path):
        result = runner.invoke(main, ["session", instance_path, "--actual", "c1,c3,c5"])
        assert result.exit_code == 0
        assert "converged" in result.output
        assert "{c1, c3, c5}" in result.output

    def test_bad_actual_reported(self, runner, instance_path):
        result = runner.invoke(main, ["session", instance_path, "--actual", "c1"])
        assert result.exit_code != 0


class TestBench:
    def test_csv_columns_and_zero_reasoner_calls(self, runner, instance_path, tmp_path):
        out = tmp_path / "stats.csv"
        result = runner.invoke(
            main,
            ["bench", "--dpi", instance_path, "--leading", "3", "--repeat", "5", "--out", str(out)],
        )
        assert result.exit_code == 0
        with open(out) as handle:
            rows = list(csv.DictReader(handle))
        assert list(rows[0]) == BENCH_COLUMNS
        assert len(rows) == 5
        for row in rows:
            assert row["cqp_count"] == "5"
            assert row["reasoner_calls_p1p2"] == "0"
            assert row["|D|"] == "3"
        assert "median query size" in result.output

    def test_random_instances(self, runner, tmp_path):
        out = tmp_path / "stats.csv"
        result = runner.invoke(
            main,
            ["bench", "--random", "2", "--comps", "8", "--leading", "4", "--out", str(out), "--enhance"],
        )
        assert result.exit_code == 0
        with open(out) as handle:
            rows = list(csv.DictReader(handle))
        assert rows
        for row in rows:
            assert row["reasoner_calls_p1p2"] == "0"
            assert int(row["reasoner_calls_p3"]) > 0

    def test_requires_some_input(self, runner):
        result = runner.invoke(main, ["bench"])
        assert result.exit_code != 0
