"""
Tests for the command-line interface.
"""
from __future__ import annotations

import math

import pytest

from app import cli
from app.cli import EXIT_DIVERGED, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, main
from app.models import Algorithm, ExperimentPlan, ExperimentResult, NmseRecord, ObjectiveKind
from app.services.bench import summarize_records


def csv_lines(path):
    return path.read_text(encoding="utf-8").splitlines()


class TestVerify:
    def test_both_constructions_pass(self, capsys):
        code = main(["verify", "--p", "10"])

        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "circulant  p=10  P=11  PASS" in out
        assert "hadamard  p=10  P=16  PASS" in out

    def test_dump_writes_one_direction_per_line(self, tmp_path):
        target = tmp_path / "cycle.csv"

        code = main(["verify", "--alg", "dspkw-2c", "--p", "4", "--dump", str(target)])

        assert code == EXIT_OK
        assert len(csv_lines(target)) == 5

    def test_dump_needs_single_source(self, tmp_path):
        assert main(["verify", "--dump", str(tmp_path / "x.csv")]) == EXIT_USAGE

    def test_random_source_has_no_cycle(self):
        assert main(["verify", "--alg", "RDKW-2R"]) == EXIT_VALIDATION

    def test_single_source(self, capsys):
        code = main(["verify", "--p", "10", "--source", "hadamard"])

        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "P=16" in out
        assert "circulant" not in out

    def test_invalid_dimension_is_a_usage_error(self):
        assert main(["verify", "--p", "0", "--source", "circulant"]) == EXIT_USAGE

    def test_random_source_is_not_a_choice(self):
        assert main(["verify", "--source", "bernoulli"]) == EXIT_USAGE


class TestUsageErrors:
    def test_missing_subcommand(self):
        assert main([]) == EXIT_USAGE

    def test_unknown_algorithm(self):
        assert main(["run", "--alg", "SPSA-2"]) == EXIT_USAGE

    def test_bench_needs_table_or_algorithms(self):
        assert main(["bench", "--reps", "2"]) == EXIT_USAGE

    @pytest.mark.parametrize(
        "flags",
        [
            ["--seed", "-1"],
            ["--sigma", "-0.1"],
            ["--seed", "abc"],
            ["--c", "0"],
            ["--a", "-1"],
            ["--B", "-5"],
            ["--budget", "0"],
        ],
    )
    def test_out_of_range_numbers_are_usage_errors(self, flags):
        assert main(["run", *flags]) == EXIT_USAGE

    def test_negative_replications_are_usage_errors(self):
        assert main(["bench", "--table", "1", "--reps", "-3"]) == EXIT_USAGE


class TestRun:
    def test_prints_summary(self, capsys):
        code = main(["run", "--alg", "DSPKW-2C", "--budget", "200"])

        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "iterations  100" in out
        assert "nmse" in out

    def test_reaches_low_nmse_on_noise_free_quadratic(self, capsys):
        code = main(["run", "--alg", "dspkw-2c", "--objective", "quadratic", "--sigma", "0", "--budget", "2000"])

        out = capsys.readouterr().out
        nmse_line = next(line for line in out.splitlines() if line.startswith("nmse"))
        assert code == EXIT_OK
        assert float(nmse_line.split()[1]) < 1e-3

    def test_invalid_schedule_refused(self, caplog):
        assert main(["run", "--budget", "200", "--alpha", "0.6", "--gamma", "0.2"]) == EXIT_VALIDATION
        assert "2(alpha-gamma)>1" in caplog.text

    def test_force_overrides_schedule_check(self):
        assert main(["run", "--budget", "200", "--alpha", "0.4", "--force"]) == EXIT_OK

    def test_start_at_optimum_is_a_validation_error(self):
        assert main(["run", "--objective", "fourth-order", "--theta0", "0"]) == EXIT_VALIDATION

    def test_trajectory_file(self, tmp_path):
        target = tmp_path / "trajectory.csv"

        code = main(["run", "--budget", "40", "--trajectory", str(target)])

        lines = csv_lines(target)
        assert code == EXIT_OK
        assert lines[0] == "iteration,squared_error"
        assert len(lines) == 1 + 21


class TestBench:
    """Tests for the bench subcommand."""

    def test_writes_csv(self, tmp_path, capsys):
        target = tmp_path / "bench.csv"

        code = main(
            ["bench", "--alg", "DSPKW-2C,RDKW-2H", "--budget", "200", "--reps", "3", "--workers", "1", "--csv", str(target)]
        )

        lines = csv_lines(target)
        assert code == EXIT_OK
        assert lines[0] == "algorithm,objective,sigma,budget,replication,seed,nmse,diverged"
        assert len(lines) == 7
        assert "RDKW-2H" in capsys.readouterr().out

    def test_same_seed_gives_byte_identical_csv(self, tmp_path):
        args = ["bench", "--alg", "RDKW-2R", "--sigma", "0.01", "--budget", "300", "--reps", "4", "--seed", "42", "--workers", "1"]
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"

        assert main([*args, "--csv", str(first)]) == EXIT_OK
        assert main([*args, "--csv", str(second)]) == EXIT_OK

        assert first.read_bytes() == second.read_bytes()

    def test_table_preset(self, capsys):
        code = main(["bench", "--table", "1", "--reps", "2", "--workers", "1"])

        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert out.count("DSPKW-2C") == 2
        assert "sigma=0.01" in out

    def test_divergence_dominated_exit_status(self, monkeypatch):
        # Arrange
        plan = ExperimentPlan(algorithms=(Algorithm.RDKW_1R,), objective=ObjectiveKind.QUADRATIC, budget=10, replications=3)
        records = tuple(
            NmseRecord(
                algorithm=Algorithm.RDKW_1R,
                objective=ObjectiveKind.QUADRATIC,
                sigma=0.0,
                budget=10,
                replication=r,
                seed=r,
                nmse=math.nan if r else 0.5,
                diverged=bool(r),
            )
            for r in range(3)
        )
        result = ExperimentResult(plan=plan, records=records, summaries=summarize_records(records))
        monkeypatch.setattr(cli, "run_experiment", lambda plan, workers: result)

        # Act
        code = main(["bench", "--alg", "RDKW-1R", "--budget", "10", "--reps", "3"])

        # Assert
        assert code == EXIT_DIVERGED

    @pytest.mark.parametrize(
        "flags, expected_c",
        [([], 0.08), (["--c", "0.5"], 0.5)],
    )
    def test_table_gain_constants_reach_the_plans(self, monkeypatch, flags, expected_c):
        # Arrange
        seen = []

        def fake_run_experiment(plan, workers):
            seen.append(plan)
            return ExperimentResult(plan=plan, records=(), summaries=summarize_records((), plan.algorithms))

        monkeypatch.setattr(cli, "run_experiment", fake_run_experiment)

        # Act
        main(["bench", "--table", "4", "--reps", "2", *flags])

        # Assert
        assert [plan.sigma for plan in seen] == [0.0, 0.01]
        assert all(plan.c == expected_c for plan in seen)
        assert all(plan.a_scale == 0.25 and plan.B == 80000.0 for plan in seen)


class TestConfigFile:
    """Tests for --config key=value files."""

    def test_file_values_are_used(self, tmp_path):
        config = tmp_path / "bench.env"
        config.write_text("alg=DSPKW-2C\nbudget=100\nreps=2\nworkers=1\n", encoding="utf-8")
        target = tmp_path / "out.csv"

        code = main(["bench", "--config", str(config), "--csv", str(target)])

        assert code == EXIT_OK
        assert len(csv_lines(target)) == 3

    def test_flags_override_file(self, tmp_path):
        config = tmp_path / "bench.env"
        config.write_text("alg=DSPKW-2C\nbudget=100\nreps=2\nworkers=1\n", encoding="utf-8")
        target = tmp_path / "out.csv"

        code = main(["bench", "--config", str(config), "--reps", "4", "--csv", str(target)])

        assert code == EXIT_OK
        assert len(csv_lines(target)) == 5

    def test_unknown_key_rejected(self, tmp_path):
        config = tmp_path / "bad.env"
        config.write_text("budget=100\nturbo=yes\n", encoding="utf-8")

        assert main(["run", "--config", str(config)]) == EXIT_USAGE

    def test_invalid_value_rejected(self, tmp_path):
        config = tmp_path / "bad.env"
        config.write_text("reps=0\n", encoding="utf-8")

        assert main(["bench", "--config", str(config)]) == EXIT_USAGE

    def test_missing_file(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "missing.env")]) == EXIT_USAGE
