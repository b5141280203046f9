import json
import math

import numpy as np
import pytest

from lqminimax.cli import main as cli_main
from lqminimax.errors import ParameterError
from lqminimax.harness import (
    COUNTEREXAMPLE_X,
    ExperimentConfig,
    TrialRecord,
    config_hash,
    corollary1_experiment,
    counterexample_scenario,
    fit_rate_slope,
    load_records,
    min_l1_interpolant,
    persist,
    plot_fit_svg,
    run_risk_experiment,
)
from lqminimax.linmodel import BallSpec


def _tiny_config(**overrides):
    base = dict(
        ball=BallSpec(0.0, 1),
        sigma=0.5,
        n_grid=(10, 20, 40),
        estimator={"kind": "l0", "s": 1},
        d_rule=("fixed", 4),
        trials_per_cell=3,
        seed_root=5,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def _synthetic_records(fn, n_grid=(100, 200, 400, 800)):
    return [
        TrialRecord(n=n, d=16, trial=t, seed=0,
                    losses={"l2": fn(n), "pred": fn(n)},
                    objective_ok=True, wall_ms=0.0)
        for n in n_grid for t in range(4)
    ]


class TestConfig:
    def test_grid_must_increase(self):
        with pytest.raises(ParameterError):
            _tiny_config(n_grid=(20, 10))

    def test_hash_changes_with_any_field(self):
        base = config_hash(_tiny_config())
        assert config_hash(_tiny_config(sigma=0.6)) != base
        assert config_hash(_tiny_config(seed_root=6)) != base
        assert config_hash(_tiny_config(trials_per_cell=4)) != base
        assert config_hash(_tiny_config()) == base

    def test_scaling_gate_binds_only_for_positive_q(self):
        cfg0 = _tiny_config()
        assert cfg0.scaling_ok(10, 4)
        cfg1 = _tiny_config(ball=BallSpec(1.0, 4.0),
                            estimator={"kind": "l1", "radius": 4.0})
        assert not cfg1.scaling_ok(1600, 32)

    def test_json_round_trip(self):
        cfg = _tiny_config()
        back = ExperimentConfig.from_json_dict(cfg.to_json_dict())
        assert config_hash(back) == config_hash(cfg)


class TestRunRiskExperiment:
    def test_record_count_and_determinism(self):
        cfg = _tiny_config()
        run1 = run_risk_experiment(cfg)
        run2 = run_risk_experiment(cfg)
        assert len(run1) == 9
        for a, b in zip(run1.records, run2.records):
            assert a.losses == b.losses  # bit-identical
            assert a.seed == b.seed

    def test_worker_count_does_not_change_results(self):
        cfg = _tiny_config()
        serial = run_risk_experiment(cfg, n_workers=1)
        parallel = run_risk_experiment(cfg, n_workers=2)
        for a, b in zip(serial.records, parallel.records):
            assert a.losses == b.losses
            assert (a.n, a.d, a.trial, a.seed) == (b.n, b.d, b.trial, b.seed)

    def test_noiseless_l0_recovers_exactly(self):
        cfg = _tiny_config(sigma=0.0, n_grid=(12,), trials_per_cell=5)
        run = run_risk_experiment(cfg)
        assert all(r.losses["l2"] <= 1e-20 for r in run.records)
        assert all(r.objective_ok for r in run.records)

    def test_scaling_gate_excludes_and_counts(self):
        cfg = _tiny_config(
            ball=BallSpec(1.0, 4.0),
            estimator={"kind": "l1", "radius": 4.0},
            n_grid=(100, 200),
            d_rule=("fixed", 8),
            enforce_scaling=True,
            trials_per_cell=1,
        )
        run = run_risk_experiment(cfg)
        assert run.excluded_cells == [(100, 8), (200, 8)]
        assert run.records == []

    def test_l0_objective_ok_is_hard_invariant(self):
        run = run_risk_experiment(_tiny_config())
        assert all(r.objective_ok for r in run.records)


class TestFitRateSlope:
    def test_exact_inverse_law(self):
        fit = fit_rate_slope(_synthetic_records(lambda n: 7.0 / n))
        assert fit.slope == pytest.approx(-1.0, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0)
        assert fit.theoretical_slope == -1.0

    def test_exact_sqrt_law(self):
        fit = fit_rate_slope(_synthetic_records(lambda n: 3.0 / math.sqrt(n)), q=1.0)
        assert fit.slope == pytest.approx(-0.5, abs=1e-12)
        assert fit.theoretical_slope == -0.5

    def test_guard_needs_three_cells(self):
        with pytest.raises(ParameterError):
            fit_rate_slope(_synthetic_records(lambda n: 1.0 / n, n_grid=(10, 20)))

    def test_zero_cells_excluded_and_flagged(self):
        recs = _synthetic_records(lambda n: 0.0 if n == 100 else 1.0 / n)
        fit = fit_rate_slope(recs)
        assert fit.excluded_zero_cells == 1
        assert fit.n_points == 3

    def test_composite_predictor(self):
        recs = _synthetic_records(lambda n: 2 * math.log(16 / 2) * 2.0 / n)
        fit = fit_rate_slope(recs, predictor="s_logd_over_n", s=2)
        assert fit.slope == pytest.approx(1.0, abs=1e-12)
        assert fit.theoretical_slope == 1.0


class TestCounterexample:
    def test_all_checks_true(self):
        report = counterexample_scenario()
        assert report.kernel_ok
        assert report.cone_ok
        assert report.l0_recovery_ok
        assert report.l1_failure_ok
        assert report.all_ok

    def test_observation_arithmetic(self):
        y = COUNTEREXAMPLE_X @ np.array([1.0, 0.0, 0.0])
        assert np.array_equal(y, [1.0, 2.0])

    def test_min_l1_norm_value(self):
        report = counterexample_scenario()
        assert report.min_l1_norm == pytest.approx(2.0 / 3.0, abs=1e-9)
        assert report.min_l1_norm < 1.0  # below the truth's norm

    def test_deterministic(self):
        a = counterexample_scenario()
        b = counterexample_scenario()
        assert a == b

    def test_interpolant_general_call(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((3, 6))
        beta = np.zeros(6)
        beta[2] = 1.5
        out = min_l1_interpolant(X, X @ beta)
        assert np.allclose(X @ out, X @ beta, atol=1e-8)
        assert np.abs(out).sum() <= np.abs(beta).sum() + 1e-8


class TestCorollary1:
    def test_tau_scaling_shifts_intercept_only(self):
        ball = BallSpec(0.0, 2)
        grid = (64, 128, 256)
        fit1 = corollary1_experiment(grid, 1.0, ball, trials_per_cell=10, seed_root=3)
        fit2 = corollary1_experiment(grid, 2.0, ball, trials_per_cell=10, seed_root=3)
        assert fit2.slope == pytest.approx(fit1.slope, abs=0.05)
        assert fit2.intercept - fit1.intercept == pytest.approx(2 * math.log(2), abs=0.1)

    def test_two_point_grid_rejected(self):
        with pytest.raises(ParameterError):
            corollary1_experiment((64, 128), 1.0, BallSpec(0.0, 2))

    def test_q_between_rejected(self):
        with pytest.raises(ParameterError):
            corollary1_experiment((64, 128, 256), 1.0, BallSpec(0.5, 2.0))


class TestPersist:
    def test_csv_schema_and_header(self, tmp_path):
        run = run_risk_experiment(_tiny_config())
        path = tmp_path / "records.csv"
        persist(run, path, format="csv")
        lines = path.read_text().splitlines()
        assert lines[0] == f"# config={run.config_hash} seed_root=5"
        assert lines[1] == "n,d,trial,seed,loss_l2,loss_pred,objective_ok,wall_ms"
        assert len(lines) == 2 + len(run.records)

    def test_json_round_trip_byte_identical(self, tmp_path):
        run = run_risk_experiment(_tiny_config())
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        persist(run, p1, format="json")
        persist(load_records(p1), p2, format="json")
        assert p1.read_bytes() == p2.read_bytes()

    def test_fit_persist(self, tmp_path):
        fit = fit_rate_slope(_synthetic_records(lambda n: 1.0 / n))
        persist(fit, tmp_path / "fit.json", format="json")
        doc = json.loads((tmp_path / "fit.json").read_text())
        assert doc["slope"] == pytest.approx(-1.0)

    def test_diagnostics_persist(self, tmp_path):
        from lqminimax.conditions import diagnose

        diag = diagnose(COUNTEREXAMPLE_X, s=1, c0=1.0)
        persist(diag, tmp_path / "diag.json", format="json")
        doc = json.loads((tmp_path / "diag.json").read_text())
        assert doc["kernel_trivial"] is True

    def test_svg_plot(self, tmp_path):
        fit = fit_rate_slope(_synthetic_records(lambda n: 1.0 / n))
        plot_fit_svg(fit, tmp_path / "fit.svg")
        text = (tmp_path / "fit.svg").read_text()
        assert text.startswith("<svg") and "circle" in text


class TestCli:
    def test_counterexample_exit_zero(self, capsys):
        assert cli_main(["counterexample"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["all_ok"] is True

    def test_rates_t4b(self, capsys):
        code = cli_main(["rates", "--theorem", "T4b",
                         "--params", "n=100,d=8,s=2,sigma=1,q=0"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["value"] == pytest.approx(81 * 2 * math.log(4) / 100, rel=1e-12)
        assert "formula" in doc

    def test_simulate_with_estimator(self, tmp_path, capsys):
        out = tmp_path / "inst.json"
        code = cli_main([
            "simulate", "--n", "20", "--d", "6", "--q", "0", "--radius", "2",
            "--sigma", "0.1", "--seed", "3", "--estimator", "l0", "--s", "2",
            "--out", str(out),
        ])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["objective_ok"] is True
        saved = json.loads(out.read_text())
        assert saved["n"] == 20 and len(saved["X"]) == 120

    def test_check_design_csv(self, tmp_path, capsys):
        path = tmp_path / "X.csv"
        np.savetxt(path, np.vstack([COUNTEREXAMPLE_X, COUNTEREXAMPLE_X]), delimiter=",")
        code = cli_main(["check-design", "--input", str(path), "--s", "1",
                         "--c0", "1.0", "--require-kernel-trivial"])
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["kernel_trivial"] is True

    def test_check_design_exit_code_on_failure(self, tmp_path, capsys):
        col = np.arange(1.0, 5.0)
        path = tmp_path / "bad.csv"
        np.savetxt(path, np.column_stack([col, col, col]), delimiter=",")
        code = cli_main(["check-design", "--input", str(path), "--s", "1",
                         "--require-kernel-trivial"])
        assert code == 1

    def test_pack_with_sidecar(self, tmp_path, capsys):
        out = tmp_path / "pack.csv"
        code = cli_main(["pack", "--d", "6", "--s", "2", "--out", str(out)])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["cardinality"] >= doc["guaranteed_cardinality"]
        assert out.exists() and (tmp_path / "pack.csv.json").exists()

    def test_fit_rate_from_config_file(self, tmp_path, capsys):
        cfg = _tiny_config(n_grid=(10, 20, 40), trials_per_cell=4)
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(cfg.to_json_dict()))
        records = tmp_path / "records.csv"
        plot = tmp_path / "fit.svg"
        code = cli_main(["fit-rate", "--config", str(cfg_path),
                         "--out-records", str(records), "--plot", str(plot)])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["n_points"] == 3
        assert records.exists() and plot.exists()
