"""
svcj-rolling command line.

Usage:
    svcj-rolling simulate [--param NAME=VALUE ...] [--horizon T] [--seed S]
    svcj-rolling estimate --input prices.csv [--window N] [--latent-out FILE]
    svcj-rolling roll --input prices.csv [--window N ...] [--parallelism P]
    svcj-rolling smooth --input params.csv [--ma-width W]
    svcj-rolling cluster --input params.csv --dims mu,beta [--k K] [--prices FILE]
    svcj-rolling elbow --input params.csv --dims mu,beta [--k-max K]

Every flag can also be set in a JSON file passed with --config.
"""

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np
from dotenv import load_dotenv
from tabulate import tabulate

from .clustering import overlay_labels, pair_cluster
from .config import build_run_config, load_config_file, write_run_config
from .data_io import (ReturnSeries, load_prices, log_returns,
                      prices_from_returns, read_param_series,
                      write_cluster_result, write_elbow_curve,
                      write_latent_summary, write_overlay,
                      write_param_series, write_simulation)
from .errors import ConfigError, SvcjError, WindowTooShortError
from .estimator import estimate_window
from .mock_components import MockEstimator
from .model import simulate_path
from .rolling import RollingConfig, rolling_estimate, smooth_series
from .settings import ENV_LOG_LEVEL, MIN_WINDOW, PARAM_NAMES, RUN_CONFIG_FILE
from .utils import ensure_output_dir

logger = logging.getLogger(__name__)


def _status(message: str):
    print(message, file=sys.stderr)


class ProgressReporter:
    """One stderr line per completed window unless quiet."""

    def __init__(self, quiet: bool, label: str = ""):
        self.quiet = quiet
        self.label = label

    def __call__(self, done, total, date, summary):
        if self.quiet:
            return
        state = "ok" if summary is not None else "missing"
        _status(f"🔄 {self.label}window {done}/{total} {date:%Y-%m-%d} {state}")


def _returns(cfg) -> ReturnSeries:
    if not cfg.input_path:
        raise ConfigError("an input file is required (--input)")
    return log_returns(load_prices(cfg.input_path), cfg.scale)


def _table(rows, headers):
    print(tabulate(rows, headers=headers, tablefmt="grid", floatfmt=".6g"))


def cmd_simulate(cfg, output_dir: Path):
    """Simulate returns and write prices with the latent path"""
    path = simulate_path(cfg.params, cfg.v0, cfg.horizon, cfg.seed)
    prices = prices_from_returns(path.y, cfg.start_date, cfg.scale, cfg.s0)
    target = write_simulation(prices, path, output_dir / "simulated.csv")
    _status(f"✅ Simulated {cfg.horizon} steps, {int(path.j.sum())} jumps: {target}")


def cmd_estimate(cfg, output_dir: Path):
    """Estimate the parameters on one window and print the summary"""
    returns = _returns(cfg)
    n = cfg.window or len(returns)
    if n > len(returns):
        raise WindowTooShortError(
            f"series shorter than window: {len(returns)} returns, window {n}")
    window = ReturnSeries(dates=returns.dates[-n:], returns=returns.returns[-n:],
                          scale=returns.scale)

    if cfg.test_mode:
        summary = MockEstimator()(window.returns, cfg.priors, cfg.mcmc, cfg.seed)
    else:
        summary = estimate_window(window.returns, cfg.priors, cfg.mcmc, cfg.seed,
                                  keep_latent=bool(cfg.latent_out))

    _status(f"\n📊 Posterior summary over {len(window)} returns "
            f"({window.dates[0]:%Y-%m-%d} to {window.dates[-1]:%Y-%m-%d})\n")
    _table(summary.table(), summary.table_headers())
    if summary.diagnostics is not None:
        d = summary.diagnostics
        _status(f"\n{d.n_draws} draws, V acceptance {d.acceptance_rate:.3f}, "
                f"{d.mean_jumps:.2f} jumps per draw")

    if cfg.latent_out:
        if summary.latent is None:
            logger.warning("The mock estimator has no latent states; "
                           "%s not written", cfg.latent_out)
        else:
            write_latent_summary(window, summary.latent, cfg.latent_out)
            _status(f"✅ Latent states written to {cfg.latent_out}")


def cmd_roll(cfg, output_dir: Path):
    """Rolling estimation for every configured window size"""
    returns = _returns(cfg)
    estimator = MockEstimator() if cfg.test_mode else estimate_window

    for n in cfg.windows:
        rolling_cfg = RollingConfig(window=n, step=cfg.step, base_seed=cfg.seed)
        series = rolling_estimate(
            returns, rolling_cfg, cfg.priors, cfg.mcmc, estimator=estimator,
            parallelism=cfg.parallelism,
            progress=ProgressReporter(cfg.quiet, label=f"n={n} "))
        raw = write_param_series(series, output_dir / f"params_w{n}.csv")
        smoothed = write_param_series(
            smooth_series(series, cfg.ma_width),
            output_dir / f"params_w{n}_ma{cfg.ma_width}.csv")
        _status(f"✅ {len(series)} windows of {n} returns: {raw}, {smoothed}")


def cmd_smooth(cfg, output_dir: Path):
    """Moving average of an existing parameter file"""
    if not cfg.input_path:
        raise ConfigError("a parameter file is required (--input)")
    series = read_param_series(cfg.input_path)
    target = output_dir / f"{Path(cfg.input_path).stem}_ma{cfg.ma_width}.csv"
    write_param_series(smooth_series(series, cfg.ma_width), target)
    _status(f"✅ Smoothed {len(series)} rows: {target}")


def _cluster(cfg, output_dir: Path, k):
    if not cfg.input_path:
        raise ConfigError("a parameter file is required (--input)")
    a, b = cfg.dims
    series = read_param_series(cfg.input_path)
    result = pair_cluster(series, a, b, k=k, k_max=cfg.k_max,
                          restarts=cfg.restarts, seed=cfg.seed,
                          workers=cfg.parallelism)
    write_cluster_result(result, output_dir / f"labels_{a}_{b}.csv",
                         output_dir / f"centroids_{a}_{b}.csv")
    centroids = result.centroids_frame()
    counts = np.bincount(result.labels, minlength=result.k)
    _table([[label, *row, counts[label]] for label, row
            in zip(centroids.index, centroids.to_numpy())],
           ["label", *centroids.columns, "points"])

    if cfg.prices_path:
        overlay = overlay_labels(result, load_prices(cfg.prices_path))
        write_overlay(overlay, output_dir / f"overlay_{a}_{b}.csv")
    return result


def cmd_cluster(cfg, output_dir: Path):
    """k-means on two parameter columns"""
    result = _cluster(cfg, output_dir, cfg.k)
    _status(f"✅ {len(result.labels)} points in {result.k} clusters, "
            f"wcss {result.wcss:.6g}")


def cmd_elbow(cfg, output_dir: Path):
    """Elbow choice of k, then k-means with that k"""
    result = _cluster(cfg, output_dir, None)
    a, b = cfg.dims
    curve = result.wcss_curve
    if curve:
        write_elbow_curve(curve, output_dir / f"elbow_{a}_{b}.csv")
        rows = []
        for i, wcss in enumerate(curve):
            second = ""
            if 0 < i < len(curve) - 1:
                second = curve[i - 1] - 2 * curve[i] + curve[i + 1]
            rows.append([i + 1, wcss, second])
        _table(rows, ["k", "wcss", "second difference"])
    _status(f"✅ Elbow selected k={result.k}")


def window_size(value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid window size {value!r}")
    if n < MIN_WINDOW:
        raise argparse.ArgumentTypeError(
            f"window size {n} is below the minimum {MIN_WINDOW}")
    return n


def positive_int(value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {value!r}")
    if n < 1:
        raise argparse.ArgumentTypeError(f"{n} must be >= 1")
    return n


def param_assignment(value: str) -> tuple:
    name, sep, number = value.partition("=")
    name = name.strip()
    if not sep or name not in PARAM_NAMES:
        raise argparse.ArgumentTypeError(
            f"expected NAME=VALUE with NAME among {', '.join(PARAM_NAMES)}")
    try:
        return name, float(number)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid value for {name}: {number!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False,
                                     argument_default=argparse.SUPPRESS)
    common.add_argument('--config', help='JSON config file with dotted keys')
    common.add_argument('--output-dir', dest='output_dir', help='Output directory')
    common.add_argument('--seed', type=int, help='Base seed (falls back to SVCJ_SEED)')
    common.add_argument('--quiet', action='store_true', help='No progress lines')

    mcmc = argparse.ArgumentParser(add_help=False,
                                   argument_default=argparse.SUPPRESS)
    mcmc.add_argument('--scale', type=float, help='Return scale (100 = percent)')
    mcmc.add_argument('--n-iter', dest='mcmc.n_iter', type=positive_int,
                      help='Gibbs sweeps per chain')
    mcmc.add_argument('--burn-in', dest='mcmc.burn_in', type=int,
                      help='Discarded sweeps')
    mcmc.add_argument('--thin', dest='mcmc.thin', type=positive_int,
                      help='Keep every k-th retained sweep')
    mcmc.add_argument('--test-mode', dest='test_mode', action='store_true',
                      help='Moment-based mock estimator instead of MCMC')

    pairs = argparse.ArgumentParser(add_help=False,
                                    argument_default=argparse.SUPPRESS)
    pairs.add_argument('--input', dest='input_path', help='Parameter CSV')
    pairs.add_argument('--dims', help='Two parameter names, e.g. mu,beta')
    pairs.add_argument('--restarts', type=positive_int, help='k-means restarts')
    pairs.add_argument('--prices', dest='prices_path',
                       help='Price CSV for the overlay output')
    pairs.add_argument('--parallelism', type=positive_int,
                       help='Threads for k-means restarts')

    parser = argparse.ArgumentParser(
        prog='svcj-rolling',
        description='Rolling-window SVCJ estimation, smoothing and clustering')
    subparsers = parser.add_subparsers(dest='command', required=True,
                                       help='Commands')

    sim = subparsers.add_parser('simulate', parents=[common],
                                argument_default=argparse.SUPPRESS,
                                help='Simulate a synthetic price series')
    sim.add_argument('--param', dest='params', type=param_assignment,
                     action='append', help='Model parameter NAME=VALUE')
    sim.add_argument('--horizon', type=positive_int, help='Number of returns')
    sim.add_argument('--v0', type=float, help='Initial variance')
    sim.add_argument('--s0', type=float, help='Starting price')
    sim.add_argument('--start-date', dest='start_date', help='First date')
    sim.add_argument('--scale', type=float, help='Return scale (100 = percent)')

    est = subparsers.add_parser('estimate', parents=[common, mcmc],
                                argument_default=argparse.SUPPRESS,
                                help='Estimate one window')
    est.add_argument('--input', dest='input_path', help='Price CSV')
    est.add_argument('--window', type=window_size,
                     help='Use the last N returns (default: all)')
    est.add_argument('--latent-out', dest='latent_out',
                     help='CSV of posterior mean V and jump probabilities')

    roll = subparsers.add_parser('roll', parents=[common, mcmc],
                                 argument_default=argparse.SUPPRESS,
                                 help='Rolling-window estimation')
    roll.add_argument('--input', dest='input_path', help='Price CSV')
    roll.add_argument('--window', dest='windows', type=window_size,
                      action='append', help='Window size, repeatable')
    roll.add_argument('--step', type=positive_int, help='Dates between windows')
    roll.add_argument('--ma-width', dest='ma_width', type=positive_int,
                      help='Moving-average width')
    roll.add_argument('--parallelism', type=positive_int, help='Worker processes')

    smooth = subparsers.add_parser('smooth', parents=[common],
                                   argument_default=argparse.SUPPRESS,
                                   help='Moving average of a parameter CSV')
    smooth.add_argument('--input', dest='input_path', help='Parameter CSV')
    smooth.add_argument('--ma-width', dest='ma_width', type=positive_int,
                        help='Moving-average width')

    cluster = subparsers.add_parser('cluster', parents=[common, pairs],
                                    argument_default=argparse.SUPPRESS,
                                    help='k-means on two parameters')
    cluster.add_argument('--k', type=positive_int,
                         help='Number of clusters (default: elbow)')

    elbow = subparsers.add_parser('elbow', parents=[common, pairs],
                                  argument_default=argparse.SUPPRESS,
                                  help='Elbow selection of k')
    elbow.add_argument('--k-max', dest='k_max', type=int,
                       help='Largest k on the wcss curve')

    return parser


COMMANDS = {
    'simulate': cmd_simulate,
    'estimate': cmd_estimate,
    'roll': cmd_roll,
    'smooth': cmd_smooth,
    'cluster': cmd_cluster,
    'elbow': cmd_elbow,
}


def configure_logging():
    load_dotenv()
    level = os.getenv(ENV_LOG_LEVEL, "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)


def run(argv=None) -> int:
    """
    Parse `argv`, run the subcommand and return the exit status.

    0 on success, 2 on usage or configuration errors, 1 on data errors.
    """
    configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    try:
        values = vars(args)
        command = values.pop('command')
        config_path = values.pop('config', None)
        for name, value in values.pop('params', []):
            values[f'params.{name}'] = value
        file_values = load_config_file(config_path) if config_path else {}
        cfg = build_run_config(values, file_values)

        output_dir = ensure_output_dir(cfg.output_dir)
        write_run_config(cfg, output_dir / RUN_CONFIG_FILE)
        if cfg.test_mode and not cfg.quiet:
            _status("🧪 TEST MODE ENABLED - mock estimator, no MCMC")
        COMMANDS[command](cfg, output_dir)
    except ConfigError as e:
        _status(f"❌ Error: {e}")
        return 2
    except (SvcjError, OSError, ValueError) as e:
        _status(f"❌ Error: {e}")
        return 1
    except Exception as e:
        logger.debug("unexpected failure", exc_info=True)
        _status(f"❌ Error: {e}")
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
