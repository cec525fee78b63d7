import json

import numpy as np
import pandas as pd
import pytest

from SvcjRolling.data_io import write_param_series
from SvcjRolling import main
from SvcjRolling.main import run


@pytest.fixture
def simulated(tmp_path):
    """Simulated price file shared by the CLI tests."""
    sim_dir = tmp_path / "sim"
    code = run(["simulate", "--horizon", "400", "--seed", "3",
                "--output-dir", str(sim_dir), "--quiet"])
    assert code == 0
    return sim_dir / "simulated.csv"


@pytest.fixture
def regime_params(tmp_path, make_series):
    """Parameter file with three well separated (mu, beta) regimes."""
    rng = np.random.default_rng(0)
    rows = [{"mu": m + rng.normal(0, 0.02), "beta": b + rng.normal(0, 0.02)}
            for m, b in [(0.0, 0.0)] * 30 + [(0.6, 0.0)] * 30 + [(0.3, 0.52)] * 30]
    path = tmp_path / "params.csv"
    write_param_series(make_series(rows), path)
    return path


def _roll(simulated, out_dir, *extra):
    return run(["roll", "--input", str(simulated), "--window", "150",
                "--step", "10", "--test-mode", "--output-dir", str(out_dir),
                "--quiet", *extra])


def test_simulate_writes_prices_and_latent_path(simulated):
    # Act
    frame = pd.read_csv(simulated)

    # Assert
    assert len(frame) == 401
    assert list(frame.columns) == ["date", "price", "v", "j", "zy", "zv", "y"]
    assert frame["price"].iloc[0] == 100.0


def test_roll_rejects_small_window(tmp_path, capsys):
    # Act
    code = run(["roll", "--input", "prices.csv", "--window", "10",
                "--output-dir", str(tmp_path)])

    # Assert
    assert code == 2
    assert "below the minimum" in capsys.readouterr().err


def test_roll_requires_input(tmp_path, capsys):
    # Act
    code = run(["roll", "--test-mode", "--output-dir", str(tmp_path), "--quiet"])

    # Assert
    assert code == 2
    assert "❌ Error:" in capsys.readouterr().err


def test_roll_writes_raw_and_smoothed_series(simulated, tmp_path):
    # Arrange
    out_dir = tmp_path / "out"

    # Act
    code = _roll(simulated, out_dir)

    # Assert
    assert code == 0
    raw = pd.read_csv(out_dir / "params_w150.csv")
    smoothed = pd.read_csv(out_dir / "params_w150_ma20.csv")
    assert len(raw) == len(smoothed) == (400 - 150 - 1) // 10 + 1
    assert raw.columns[0] == "date"
    assert list(raw["date"]) == list(smoothed["date"])


def test_roll_is_reproducible(simulated, tmp_path):
    # Act
    _roll(simulated, tmp_path / "first")
    _roll(simulated, tmp_path / "second")
    _roll(simulated, tmp_path / "parallel", "--parallelism", "2")

    # Assert
    first = (tmp_path / "first" / "params_w150.csv").read_bytes()
    assert first == (tmp_path / "second" / "params_w150.csv").read_bytes()
    assert first == (tmp_path / "parallel" / "params_w150.csv").read_bytes()


def test_roll_mcmc_serial_and_parallel_match(simulated, tmp_path):
    # Arrange
    args = ["roll", "--input", str(simulated), "--window", "150", "--step", "50",
            "--n-iter", "60", "--burn-in", "30", "--quiet"]

    # Act
    serial = run([*args, "--output-dir", str(tmp_path / "serial")])
    parallel = run([*args, "--output-dir", str(tmp_path / "parallel"),
                    "--parallelism", "2"])

    # Assert
    assert serial == parallel == 0
    first = (tmp_path / "serial" / "params_w150.csv").read_bytes()
    assert first == (tmp_path / "parallel" / "params_w150.csv").read_bytes()


def test_unexpected_failure_is_reported(regime_params, tmp_path, monkeypatch, capsys):
    # Arrange
    def boom(cfg, output_dir):
        raise RuntimeError("worker crashed")

    monkeypatch.setitem(main.COMMANDS, "smooth", boom)

    # Act
    code = run(["smooth", "--input", str(regime_params),
                "--output-dir", str(tmp_path / "out")])

    # Assert
    assert code == 1
    assert "❌ Error: worker crashed" in capsys.readouterr().err


def test_roll_reports_progress(simulated, tmp_path, capsys):
    # Act
    run(["roll", "--input", str(simulated), "--window", "300", "--step", "50",
         "--test-mode", "--output-dir", str(tmp_path)])

    # Assert
    err = capsys.readouterr().err
    assert "🧪 TEST MODE ENABLED" in err
    assert "🔄 n=300 window 1/2" in err
    assert "🔄 n=300 window 2/2" in err


def test_run_config_is_written(simulated, tmp_path):
    # Act
    _roll(simulated, tmp_path)

    # Assert
    data = json.loads((tmp_path / "run_config.json").read_text())
    assert data["windows"] == [150]
    assert data["step"] == 10
    assert data["test_mode"] is True
    assert data["input_path"] == str(simulated)


def test_config_file_values_are_used(simulated, tmp_path):
    # Arrange
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"input_path": str(simulated), "windows": [200],
                                  "step": 25, "ma_width": 5, "test_mode": True,
                                  "quiet": True}))

    # Act
    code = run(["roll", "--config", str(config), "--output-dir", str(tmp_path)])

    # Assert
    assert code == 0
    assert (tmp_path / "params_w200.csv").exists()
    assert (tmp_path / "params_w200_ma5.csv").exists()


def test_environment_seed_lands_in_run_config(tmp_path, monkeypatch):
    # Arrange
    monkeypatch.setenv("SVCJ_SEED", "77")

    # Act
    code = run(["simulate", "--horizon", "50", "--output-dir", str(tmp_path),
                "--quiet"])

    # Assert
    assert code == 0
    assert json.loads((tmp_path / "run_config.json").read_text())["seed"] == 77


def test_bad_price_file(write_prices, tmp_path, capsys):
    # Arrange
    path = write_prices([("2015-01-01", 100), ("2015-01-02", -5)])

    # Act
    code = run(["roll", "--input", str(path), "--test-mode",
                "--output-dir", str(tmp_path), "--quiet"])

    # Assert
    assert code == 1
    assert "❌ Error:" in capsys.readouterr().err


def test_missing_price_file(tmp_path, capsys):
    # Act
    code = run(["estimate", "--input", str(tmp_path / "absent.csv"),
                "--test-mode", "--output-dir", str(tmp_path), "--quiet"])

    # Assert
    assert code == 1
    assert "❌ Error:" in capsys.readouterr().err


def test_estimate_prints_summary_table(simulated, tmp_path, capsys):
    # Act
    code = run(["estimate", "--input", str(simulated), "--window", "200",
                "--test-mode", "--output-dir", str(tmp_path), "--quiet"])

    # Assert
    assert code == 0
    out = capsys.readouterr().out
    for header in ("parameter", "mean", "q95", "sigma_v", "lambda"):
        assert header in out


def test_estimate_window_longer_than_series(simulated, tmp_path, capsys):
    # Act
    code = run(["estimate", "--input", str(simulated), "--window", "1000",
                "--test-mode", "--output-dir", str(tmp_path), "--quiet"])

    # Assert
    assert code == 1
    assert "series shorter than window" in capsys.readouterr().err


def test_smooth_leaves_input_unchanged(regime_params, tmp_path):
    # Arrange
    before = regime_params.read_text()
    out_dir = tmp_path / "out"

    # Act
    code = run(["smooth", "--input", str(regime_params), "--ma-width", "5",
                "--output-dir", str(out_dir), "--quiet"])

    # Assert
    assert code == 0
    assert regime_params.read_text() == before
    smoothed = pd.read_csv(out_dir / "params_ma5.csv")
    assert len(smoothed) == 90
    assert smoothed["mu"].iloc[4] == pytest.approx(
        pd.read_csv(regime_params)["mu"].iloc[:5].mean())


def test_cluster_with_fixed_k(regime_params, tmp_path, capsys):
    # Act
    code = run(["cluster", "--input", str(regime_params), "--dims", "mu,beta",
                "--k", "3", "--restarts", "5", "--output-dir", str(tmp_path),
                "--quiet"])

    # Assert
    assert code == 0
    labels = pd.read_csv(tmp_path / "labels_mu_beta.csv")
    centroids = pd.read_csv(tmp_path / "centroids_mu_beta.csv")
    assert labels["label"].nunique() == 3
    assert len(labels) == 90
    assert list(centroids["label"]) == [0, 1, 2]
    assert "points" in capsys.readouterr().out


def test_cluster_overlay_with_prices(regime_params, write_prices, tmp_path):
    # Arrange
    dates = pd.date_range("2020-12-01", periods=150, freq="D")
    prices = write_prices([(f"{d:%Y-%m-%d}", 100 + i) for i, d in enumerate(dates)])

    # Act
    code = run(["cluster", "--input", str(regime_params), "--dims", "mu,beta",
                "--k", "3", "--restarts", "5", "--prices", str(prices),
                "--output-dir", str(tmp_path), "--quiet"])

    # Assert
    assert code == 0
    overlay = pd.read_csv(tmp_path / "overlay_mu_beta.csv")
    assert list(overlay.columns) == ["date", "price", "label"]
    assert len(overlay) == 90


def test_cluster_unknown_dimension(regime_params, tmp_path, capsys):
    # Act
    code = run(["cluster", "--input", str(regime_params), "--dims", "mu,gamma",
                "--output-dir", str(tmp_path), "--quiet"])

    # Assert
    assert code == 1
    assert "gamma" in capsys.readouterr().err


def test_elbow_writes_curve(regime_params, tmp_path, capsys):
    # Act
    code = run(["elbow", "--input", str(regime_params), "--dims", "mu,beta",
                "--restarts", "5", "--output-dir", str(tmp_path), "--quiet"])

    # Assert
    assert code == 0
    curve = pd.read_csv(tmp_path / "elbow_mu_beta.csv")
    assert list(curve.columns) == ["k", "wcss"]
    assert list(curve["k"]) == list(range(1, 9))
    assert "second difference" in capsys.readouterr().out
    labels = pd.read_csv(tmp_path / "labels_mu_beta.csv")
    assert labels["label"].nunique() == 3
