"""CLI tests: subcommand wiring, file formats, determinism, exit codes,
and figure rendering."""

import csv
import json
import math
import os

import pytest

from pickands.cli import (
    appendix_fixture_path,
    default_alpha_grid,
    main,
    parse_alphas,
    parse_number,
)


def read_csv(path):
    with open(path, newline="") as stream:
        return list(csv.DictReader(stream))


class TestParsing:
    def test_parse_number_forms(self):
        assert parse_number("0.25") == 0.25
        assert parse_number("1/8") == 0.125
        assert parse_number("2^-10") == 2.0**-10
        assert parse_number("2**-10") == 2.0**-10
        with pytest.raises(Exception):
            parse_number("abc")

    def test_parse_alphas(self):
        assert parse_alphas("1.0,1.5") == [1.0, 1.5]
        assert parse_alphas("") == []
        grid = parse_alphas("0.7:0.05:2.0")
        assert len(grid) == 27
        assert grid[0] == 0.7 and grid[-1] == 2.0

    def test_default_grid_is_experiment_grid(self):
        grid = default_alpha_grid()
        assert len(grid) == 27
        assert grid[0] == 0.7 and grid[-1] == 2.0


class TestEstimateCommand:
    def test_columns_and_determinism(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        argv = ["estimate", "--alphas", "1.0,1.5", "--T", "4", "--eta", "1/4",
                "--reps", "3", "--seed", "7", "--no-fig"]
        assert main(argv + ["--out", str(out1)]) == 0
        assert main(argv + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        rows = read_csv(out1)
        assert list(rows[0].keys()) == [
            "alpha", "estimate", "sample_stddev", "stderr", "ci95_lo", "ci95_hi",
        ]
        assert [r["alpha"] for r in rows] == ["1", "1.5"]

    def test_single_rep_blank_stddev(self, tmp_path, capsys):
        out = tmp_path / "one.csv"
        assert main(["estimate", "--alphas", "1.0", "--T", "4", "--eta", "1/4",
                     "--reps", "1", "--out", str(out), "--no-fig"]) == 0
        row = read_csv(out)[0]
        assert row["sample_stddev"] == "" and row["stderr"] == ""
        assert float(row["estimate"]) > 0

    def test_empty_grid_header_only(self, tmp_path):
        out = tmp_path / "empty.csv"
        assert main(["estimate", "--alphas", "", "--T", "4", "--eta", "1/4",
                     "--out", str(out), "--no-fig"]) == 0
        assert out.read_text().strip() == "alpha,estimate,sample_stddev,stderr,ci95_lo,ci95_hi"

    def test_bad_grid_exits_config_code(self):
        assert main(["estimate", "--alphas", "3.0", "--T", "4", "--eta", "1/4",
                     "--no-fig", "--out", "-"]) == 2

    def test_repeatable_alpha_flag(self, tmp_path):
        out1 = tmp_path / "flag.csv"
        out2 = tmp_path / "list.csv"
        common = ["--T", "4", "--eta", "1/4", "--reps", "2", "--seed", "1", "--no-fig"]
        assert main(["estimate", "--alpha", "1.0", "--alpha", "1.5",
                     "--out", str(out1)] + common) == 0
        assert main(["estimate", "--alphas", "1.0,1.5",
                     "--out", str(out2)] + common) == 0
        assert out1.read_bytes() == out2.read_bytes()
        assert main(["estimate", "--alpha", "1.0", "--alphas", "1.5",
                     "--out", "-", "--no-fig"] + common[:6]) == 2

    def test_json_format(self, tmp_path):
        out = tmp_path / "est.json"
        assert main(["estimate", "--alphas", "1.0", "--T", "4", "--eta", "1/4",
                     "--reps", "2", "--out", str(out), "--no-fig",
                     "--format", "json"]) == 0
        payload = json.loads(out.read_text())
        assert payload[0]["alpha"] == 1.0

    def test_figure_rendered_by_default(self, tmp_path):
        out = tmp_path / "est.csv"
        assert main(["estimate", "--alphas", "1.0", "--T", "4", "--eta", "1/4",
                     "--reps", "2", "--out", str(out)]) == 0
        assert (tmp_path / "est.png").exists()


class TestBoundsCommand:
    def test_reference_fixture_round_trip(self, tmp_path):
        out = tmp_path / "bounds.csv"
        assert main(["bounds", appendix_fixture_path(), "--T", "128",
                     "--eta", "2^-18", "--out", str(out), "--no-fig"]) == 0
        rows = read_csv(out)
        assert len(rows) == 27
        by_alpha = {float(r["alpha"]): r for r in rows}
        assert by_alpha[0.7]["lower_bound"] == "---"
        assert by_alpha[0.7]["upper_bound"] == "---"
        ref = read_csv(appendix_fixture_path())
        ref_by_alpha = {float(r["alpha"]): r for r in ref}
        for alpha in (1.05, 1.5, 1.998):
            got = by_alpha[alpha]
            want = ref_by_alpha[alpha]
            assert abs(float(got["lower_bound"]) - float(want["lower_bound"])) <= 1e-4
            assert abs(float(got["upper_bound"]) - float(want["upper_bound"])) <= 1e-4

    def test_empty_input_empty_output(self, tmp_path):
        src = tmp_path / "empty.csv"
        src.write_text("alpha,estimate\n")
        out = tmp_path / "out.csv"
        assert main(["bounds", str(src), "--out", str(out), "--no-fig"]) == 0
        assert read_csv(out) == []

    def test_json_reports_have_breakdown(self, tmp_path):
        src = tmp_path / "in.csv"
        src.write_text("alpha,estimate\n1.5,0.7727308\n0.7,1.2\n")
        out = tmp_path / "out.json"
        assert main(["bounds", str(src), "--T", "128", "--eta", "2^-18",
                     "--out", str(out), "--no-fig", "--format", "json"]) == 0
        payload = json.loads(out.read_text())
        assert "ub_main" in payload[0]["breakdown"]
        assert payload[0]["preconditions_ok"] == {"upper": True, "lower": True}
        assert payload[1]["lb"] is None and payload[1]["ub"] is None

    def test_output_parses_back_as_estimates(self, tmp_path):
        # cmd_bounds(cmd_estimate output) round-trips without loss
        est = tmp_path / "est.csv"
        assert main(["estimate", "--alphas", "1.0,1.4", "--T", "8", "--eta", "1/8",
                     "--reps", "3", "--out", str(est), "--no-fig"]) == 0
        out = tmp_path / "b.csv"
        assert main(["bounds", str(est), "--T", "8", "--eta", "1/8",
                     "--out", str(out), "--no-fig"]) == 0
        rows = read_csv(out)
        est_rows = read_csv(est)
        assert [r["alpha"] for r in rows] == [r["alpha"] for r in est_rows]
        assert [r["estimate"] for r in rows] == [r["estimate"] for r in est_rows]


class TestTableCommand:
    def test_compose(self, tmp_path):
        out = tmp_path / "table.csv"
        assert main(["table", "--alphas", "1.0,2.0", "--T", "4", "--eta", "1/4",
                     "--reps", "3", "--out", str(out), "--no-fig"]) == 0
        rows = read_csv(out)
        assert list(rows[0].keys()) == [
            "alpha", "estimate", "sample_stddev", "lower_bound", "upper_bound",
        ]

    def test_empty_grid(self, tmp_path):
        out = tmp_path / "table.csv"
        assert main(["table", "--alphas", "", "--out", str(out), "--no-fig"]) == 0
        assert read_csv(out) == []


class TestRegressCommand:
    def test_single_eta_rejected(self):
        assert main(["regress", "--alphas", "1.0", "--T", "4", "--eta", "1/4",
                     "--etas", "1/4", "--reps", "3", "--out", "-", "--no-fig"]) == 2

    def test_sweep_and_fit(self, tmp_path):
        out = tmp_path / "fit.csv"
        assert main(["regress", "--alphas", "1.0", "--T", "8", "--eta", "1/16",
                     "--etas", "1/16,1/8,1/4,1/2", "--reps", "50", "--seed", "3",
                     "--out", str(out), "--no-fig"]) == 0
        row = read_csv(out)[0]
        assert set(row) == {"alpha", "h_T_hat", "c_hat", "predicted_finest", "raw_finest"}
        assert float(row["h_T_hat"]) > float(row["raw_finest"])  # c_hat > 0

    def test_from_file_exact_echo(self, tmp_path):
        src = tmp_path / "points.csv"
        lines = ["alpha,eta,estimate"]
        for eta in (0.25, 0.125, 0.0625):
            lines.append(f"1.0,{eta},{0.9 - 0.5 * eta ** 0.5:.17g}")
        src.write_text("\n".join(lines) + "\n")
        out = tmp_path / "fit.json"
        assert main(["regress", "--from", str(src), "--out", str(out),
                     "--no-fig", "--format", "json"]) == 0
        fit = json.loads(out.read_text())[0]
        assert math.isclose(fit["h_T_hat"], 0.9, abs_tol=1e-12)
        assert math.isclose(fit["c_hat"], 0.5, abs_tol=1e-12)
        assert math.isclose(fit["predicted_finest"], fit["raw_finest"], abs_tol=1e-12)


class TestIdentityCommand:
    def test_pass_within_tolerance(self, tmp_path):
        out = tmp_path / "id.csv"
        assert main(["identity-check", "--eta", "0.5", "--tol", "1e-4",
                     "--out", str(out), "--no-fig"]) == 0
        row = read_csv(out)[0]
        assert abs(float(row["value"]) - 2.0) <= 1e-4

    def test_impossible_tolerance_exits_numerical_code(self, tmp_path):
        out = tmp_path / "id.csv"
        assert main(["identity-check", "--eta", "0.5", "--tol", "0",
                     "--out", str(out), "--no-fig"]) == 3


class TestFgnDumpCommand:
    def test_zero_count_header_only(self, tmp_path):
        out = tmp_path / "dump.csv"
        assert main(["fgn-dump", "--alpha", "1.0", "--T", "1", "--eta", "1/2",
                     "--count", "0", "--out", str(out), "--no-fig"]) == 0
        assert out.read_text().strip() == "rep,t,B_t,Z_t"

    def test_alpha_two_linear_column(self, tmp_path):
        out = tmp_path / "dump.csv"
        assert main(["fgn-dump", "--alpha", "2.0", "--T", "1", "--eta", "1/2",
                     "--count", "1", "--seed", "5", "--out", str(out), "--no-fig"]) == 0
        rows = read_csv(out)
        slope = float(rows[0]["B_t"]) / float(rows[0]["t"])
        for row in rows:
            t = float(row["t"])
            if t != 0.0:
                assert math.isclose(float(row["B_t"]) / t, slope, rel_tol=1e-6)
            else:
                assert float(row["B_t"]) == 0.0


class TestWorkersEnv:
    def test_env_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PICKANDS_WORKERS", "2")
        out1 = tmp_path / "env.csv"
        assert main(["estimate", "--alphas", "1.0", "--T", "4", "--eta", "1/4",
                     "--reps", "4", "--seed", "9", "--out", str(out1), "--no-fig"]) == 0
        monkeypatch.delenv("PICKANDS_WORKERS")
        out2 = tmp_path / "direct.csv"
        assert main(["estimate", "--alphas", "1.0", "--T", "4", "--eta", "1/4",
                     "--reps", "4", "--seed", "9", "--workers", "1",
                     "--out", str(out2), "--no-fig"]) == 0
        assert out1.read_bytes() == out2.read_bytes()
