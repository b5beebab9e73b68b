import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.cli.commands import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, run
from app.cli.reporter import Report, format_cell, write_artifacts, write_csv, _jsonable
from app.simulation.statistics import Estimate


@pytest.fixture
def cli_env(tmp_path, monkeypatch):
    for name in ("DISASTER_CONFIG", "DISASTER_SEED", "DISASTER_WORKERS", "DISASTER_RECORD_RUNS"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("DISASTER_OUT_DIR", str(tmp_path / "artifacts"))
    monkeypatch.setenv("DISASTER_DATABASE_URL", f"sqlite:///{tmp_path / 'runs.db'}")
    return tmp_path


def artifacts(root: Path, command: str):
    csv_paths = sorted((root / "artifacts").glob(f"{command}-*.csv"))
    assert csv_paths, f"no artifacts for {command}"
    path = csv_paths[-1]
    with path.open(newline="") as f:
        rows = list(csv.DictReader(f))
    sidecar = json.loads(path.with_suffix(".json").read_text())
    return rows, sidecar


def column(rows, name):
    return np.array([float(row[name]) for row in rows])


class TestReporter:
    def test_cells(self):
        assert format_cell(None) == ""
        assert format_cell(True) == "1"
        assert format_cell(np.int64(3)) == "3"
        for value in (0.1, 1 / 3, 6.02214076e23, 5e-324):
            assert float(format_cell(value)) == value

    def test_checks(self):
        report = Report("demo")
        assert report.check("close", 1.0, 1.0 + 1e-13, 1e-12).passed
        assert not report.check("far", 1.0, 2.0, 0.5).passed
        assert report.check_range("inside", 0.95, 0.85, 1.15, 1.0).passed
        assert report.check_estimate("mc", Estimate(1.01, 0.01, 1.0)).passed
        assert not report.check_flag("flag", False).passed
        assert not report.passed
        assert report.oracle_deltas()["far"]["passed"] is False

    def test_non_finite_values_survive_json(self):
        assert _jsonable({"a": math.inf, 1: [np.float64(0.5)]}) == {"a": "inf", "1": [0.5]}

    def test_csv_and_sidecar(self, tmp_settings):
        report = Report("demo", index_name="n", spec={"model": "B"})
        report.add_row(0, 0.5, 0.5)
        report.add_row(1, 0.25, None, 0.24, 0.01)
        report.check("zero", 0.5, 0.5, 0.0)
        csv_path, json_path = write_artifacts(report, tmp_settings, "20260101T000000000000Z")
        assert Path(csv_path).name == "demo-20260101T000000000000Z.csv"
        lines = Path(csv_path).read_text().splitlines()
        assert lines[0] == "n,analytic,oracle,mc_estimate,mc_stderr"
        assert lines[1] == "0,0.5,0.5,,"
        sidecar = json.loads(Path(json_path).read_text())
        assert sidecar["passed"] is True
        assert sidecar["config"]["seed"] == 11
        assert sidecar["spec"] == {"model": "B"}

    def test_csv_overwrites(self, tmp_path):
        path = write_csv(Report("demo"), tmp_path / "out" / "demo.csv")
        assert path.read_text().strip() == "x,analytic,oracle,mc_estimate,mc_stderr"


class TestExitCodes:
    def test_classify(self, cli_env, capsys):
        assert run(["classify", "--model", "B", "--alpha", "2", "--no-record"]) == EXIT_OK
        assert "PositiveRecurrent" in capsys.readouterr().out

    def test_missing_alpha_is_a_usage_error(self, cli_env):
        assert run(["classify", "--model", "B", "--no-record"]) == EXIT_USAGE

    def test_bad_choice_is_a_usage_error(self, cli_env):
        assert run(["classify", "--model", "C", "--alpha", "1"]) == EXIT_USAGE
        assert run([]) == EXIT_USAGE

    def test_invalid_spec_names_the_invariant(self, cli_env, capsys):
        assert run(["classify", "--model", "A", "--alpha", "3", "--nu", "1", "--no-record"]) == EXIT_DOMAIN
        assert "alpha<nu+1" in capsys.readouterr().err

    def test_transient_invariant_measure(self, cli_env):
        assert run(["invariant", "--model", "B", "--alpha", "1", "--beta", "2", "--no-record"]) == EXIT_DOMAIN

    def test_confined_contact_has_no_asymptote(self, cli_env):
        argv = ["contact", "--model", "A", "--alpha", "1", "--nu", "0", "--nmax", "10", "--no-record"]
        assert run(argv) == EXIT_DOMAIN

    def test_missing_config_file(self, cli_env):
        assert run(["classify", "--model", "B", "--alpha", "2", "--config", "absent.env"]) == EXIT_USAGE


class TestCommands:
    def test_invariant_matches_the_renewal_form(self, cli_env):
        assert run(["invariant", "--model", "B", "--alpha", "2", "--xmax", "10", "--no-record"]) == EXIT_OK
        rows, sidecar = artifacts(cli_env, "invariant")
        assert len(rows) == 11
        assert_allclose(column(rows, "analytic"), column(rows, "oracle"), rtol=1e-12)
        assert sidecar["summary"]["normalized"] is True

    def test_invariant_with_simulation(self, cli_env):
        argv = ["invariant", "--model", "B", "--alpha", "3", "--xmax", "3", "--steps", "50000", "--no-record"]
        assert run(argv) == EXIT_OK
        rows, _ = artifacts(cli_env, "invariant")
        assert_allclose(column(rows, "mc_estimate"), column(rows, "analytic"), atol=0.02)

    def test_return_time(self, cli_env):
        argv = ["return-time", "--model", "A", "--alpha", "1.5", "--nu", "1", "--xmax", "15", "--no-record"]
        assert run(argv) == EXIT_OK
        rows, sidecar = artifacts(cli_env, "return-time")
        assert rows[0]["x"] == "1"
        assert_allclose(column(rows, "analytic"), column(rows, "oracle"), rtol=1e-12, atol=1e-300)
        assert_allclose(sidecar["summary"]["mean_return_time"], 3.0)

    def test_heights(self, cli_env):
        argv = ["heights", "--model", "B", "--alpha", "1", "--beta", "2", "--hmax", "10",
                "--excursions", "2000", "--no-record"]
        assert run(argv) == EXIT_OK
        rows, sidecar = artifacts(cli_env, "heights")
        assert_allclose(column(rows, "analytic")[1:], column(rows, "oracle")[1:], rtol=1e-10)
        assert sidecar["summary"]["defect"] > 0

    def test_green(self, cli_env):
        argv = ["green", "--model", "B", "--alpha", "1.5", "--p0", "0.6", "--x", "3", "--y", "1",
                "--order", "12", "--no-record"]
        assert run(argv) == EXIT_OK
        rows, _ = artifacts(cli_env, "green")
        assert_allclose(column(rows, "analytic"), column(rows, "oracle"), atol=1e-12)

    def test_contact(self, cli_env):
        assert run(["contact", "--model", "B", "--alpha", "0.5", "--nmax", "40", "--no-record"]) == EXIT_OK
        rows, sidecar = artifacts(cli_env, "contact")
        assert_allclose(column(rows, "analytic"), column(rows, "oracle"), atol=1e-12)
        assert sidecar["summary"]["regime"] == "algebraic"

    def test_extinction(self, cli_env):
        argv = ["extinction", "--model", "B", "--alpha", "1", "--beta", "2", "--xmax", "5", "--no-record"]
        assert run(argv) == EXIT_OK
        rows, _ = artifacts(cli_env, "extinction")
        assert_allclose(column(rows, "analytic"), column(rows, "oracle"), rtol=1e-10)

    def test_extinction_walkers_report_their_bias(self, cli_env):
        argv = ["extinction", "--model", "B", "--alpha", "1", "--beta", "2", "--xmax", "3",
                "--walkers", "2000", "--no-record"]
        assert run(argv) == EXIT_OK
        _, sidecar = artifacts(cli_env, "extinction")
        assert 0.0 < sidecar["summary"]["hit_bias_bound"] <= 1e-3

    def test_ct_excursion(self, cli_env):
        argv = ["ct-excursion", "--model", "B", "--alpha", "2", "--lam", "0.5", "--hmax", "5",
                "--t", "2", "--samples", "500", "--no-record"]
        assert run(argv) == EXIT_OK
        rows, sidecar = artifacts(cli_env, "ct-excursion")
        assert_allclose(column(rows, "analytic"), column(rows, "oracle"), rtol=1e-9)
        assert sidecar["summary"]["tail_kind"] == "power"
        assert sidecar["summary"]["explosive"] is False

    def test_ct_excursion_needs_rates(self, cli_env):
        argv = ["ct-excursion", "--model", "B", "--alpha", "2", "--no-record"]
        assert run(argv) == EXIT_DOMAIN

    def test_divisibility_special_case(self, cli_env):
        argv = ["divisibility", "--model", "A", "--alpha", "1.5", "--nu", "1", "--p0", "0.4",
                "--n", "30", "--no-record"]
        assert run(argv) == EXIT_OK
        rows, sidecar = artifacts(cli_env, "divisibility")
        assert_allclose(column(rows, "analytic"), column(rows, "oracle"), rtol=1e-9, atol=1e-12)
        assert sidecar["summary"]["id"] is True
        assert sidecar["summary"]["sd"] is False

    def test_divisibility_scan(self, cli_env):
        argv = ["divisibility", "--model", "A", "--alpha", "1.5", "--nu", "1", "--scan-p0",
                "--step", "0.25", "--no-record"]
        assert run(argv) == EXIT_OK
        rows, sidecar = artifacts(cli_env, "divisibility-scan")
        assert [row["p0"] for row in rows] == ["0.25", "0.5", "0.75", "1"]
        assert sidecar["summary"]["sd_holds_up_to"] == 0.25

    def test_simulate(self, cli_env):
        argv = ["simulate", "--model", "B", "--alpha", "2", "--horizon", "5000", "--replications", "2",
                "--no-record"]
        assert run(argv) == EXIT_OK
        rows, sidecar = artifacts(cli_env, "simulate")
        assert len(rows) == 21
        assert sidecar["summary"]["replications"] == 2

    def test_simulate_ct(self, cli_env):
        argv = ["simulate", "--ct", "--model", "B", "--alpha", "2", "--lam", "0.5", "--horizon", "100",
                "--no-record"]
        assert run(argv) == EXIT_OK
        _, sidecar = artifacts(cli_env, "simulate-ct")
        assert sidecar["summary"]["stopped_by"] == ["horizon"]

    def test_seed_makes_runs_reproducible(self, cli_env):
        argv = ["return-time", "--model", "B", "--alpha", "2", "--xmax", "5", "--excursions", "1000",
                "--seed", "3", "--no-record"]
        assert run(argv) == EXIT_OK
        first, _ = artifacts(cli_env, "return-time")
        assert run(argv) == EXIT_OK
        second, _ = artifacts(cli_env, "return-time")
        assert first == second


class TestVerify:
    @pytest.mark.parametrize("suite", ["classification", "monotonicity", "duality"])
    def test_fast_suites_pass(self, cli_env, suite):
        assert run(["verify", "--suite", suite, "--no-record"]) == EXIT_OK
        _, sidecar = artifacts(cli_env, f"verify-{suite}")
        assert sidecar["passed"] is True

    def test_unknown_suite(self, cli_env):
        assert run(["verify", "--suite", "nonsense"]) == EXIT_USAGE


class TestExperimentRecords:
    def test_runs_are_recorded(self, cli_env):
        from app.models import ExperimentRecord, database

        assert run(["classify", "--model", "B", "--alpha", "2"]) == EXIT_OK
        db = database.SessionLocal()
        try:
            records = db.query(ExperimentRecord).all()
        finally:
            db.close()
        assert len(records) == 1
        assert records[0].command == "classify"
        assert records[0].spec["alpha"] == 2.0
        assert len(records[0].outputs) == 2

    def test_records_follow_the_configured_database(self, cli_env):
        import app.models
        from app.models import database

        assert run(["classify", "--model", "B", "--alpha", "2"]) == EXIT_OK
        assert str(database.engine.url) == f"sqlite:///{cli_env / 'runs.db'}"
        assert database.SessionLocal.kw["bind"] is database.engine
        assert "engine" not in app.models.__all__
        assert not hasattr(app.models, "engine")
