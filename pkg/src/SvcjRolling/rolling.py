"""
Rolling-window estimation and moving-average smoothing.

The row dated at return index t (1-based) is estimated on returns
[t - n, t - 1], for t = n + 1, n + 1 + step, ... <= T.
"""

import asyncio
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import pandas as pd

from .data_io import PARAM_COLUMNS, ReturnSeries
from .errors import ConfigError, NumericalError, WindowTooShortError
from .estimator import PosteriorSummary, estimate_window
from .mcmc import McmcConfig, Priors
from .model import SvcjParams
from .settings import (DEFAULT_SEED, MA_WIDTH, MIN_WINDOW, PARAM_NAMES,
                       ROLLING_STEP)
from .utils import window_seed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RollingConfig:
    window: int
    step: int = ROLLING_STEP
    base_seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.window < MIN_WINDOW:
            raise ConfigError(
                f"window must be >= {MIN_WINDOW}, got {self.window}")
        if self.step < 1:
            raise ConfigError(f"step must be >= 1, got {self.step}")


@dataclass(frozen=True, eq=False)
class ParamTimeSeries:
    dates: pd.DatetimeIndex
    # None marks a window whose estimation failed
    rows: tuple
    window: Optional[int] = None

    def __post_init__(self):
        if len(self.dates) != len(self.rows):
            raise ValueError(f"{len(self.dates)} dates for {len(self.rows)} rows")
        if len(self.dates) > 1 and not (np.diff(self.dates.asi8) > 0).all():
            raise ValueError("dates must be strictly increasing")

    def __len__(self):
        return len(self.rows)

    def to_frame(self) -> pd.DataFrame:
        """One row per date with the parameter file columns; NaN when missing."""
        index = pd.DatetimeIndex(self.dates, name="date")
        if not self.rows:
            return pd.DataFrame(columns=list(PARAM_COLUMNS), index=index,
                                dtype=float)
        records = [row.as_row() if row is not None else {} for row in self.rows]
        return pd.DataFrame(records, columns=list(PARAM_COLUMNS),
                            index=index).astype(float)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, window=None) -> "ParamTimeSeries":
        rows = []
        for _, values in frame.iterrows():
            means = values[list(PARAM_NAMES)]
            if means.isna().any():
                rows.append(None)
                continue
            rows.append(PosteriorSummary(
                mean=SvcjParams(*(float(m) for m in means)),
                sd={name: float(values[f"{name}_sd"]) for name in PARAM_NAMES},
            ))
        return cls(dates=pd.DatetimeIndex(frame.index, name="date"),
                   rows=tuple(rows), window=window)

    def column(self, name: str) -> np.ndarray:
        """A parameter (or `_sd`) column, NaN at missing rows."""
        return self.to_frame()[name].to_numpy()

    @property
    def missing(self) -> np.ndarray:
        return np.array([row is None for row in self.rows], dtype=bool)


def window_count(n_returns: int, window: int, step: int = 1) -> int:
    if n_returns < window + 1:
        return 0
    return (n_returns - window - 1) // step + 1


def _window_tasks(returns: ReturnSeries, cfg: RollingConfig, priors, mcmc_cfg):
    y = np.asarray(returns.returns, dtype=float)
    n = cfg.window
    for index, t in enumerate(range(n + 1, len(y) + 1, cfg.step)):
        yield (index, y[t - 1 - n:t - 1], priors, mcmc_cfg,
               window_seed(cfg.base_seed, t))


def _run_window(estimator, index, window_returns, priors, mcmc_cfg, seed):
    try:
        return index, estimator(window_returns, priors, mcmc_cfg, seed)
    except NumericalError as e:
        logger.warning("window %d recorded as missing: %s", index, e)
        return index, None


async def rolling_estimate_async(
        returns: ReturnSeries, cfg: RollingConfig,
        priors: Optional[Priors] = None,
        mcmc_cfg: Optional[McmcConfig] = None, *,
        estimator: Callable = estimate_window, parallelism: int = 1,
        progress: Optional[Callable] = None) -> ParamTimeSeries:
    """
    Estimate every window and collect the rows by window index.

    Args:
        returns: Full return series.
        cfg: Window size, step and base seed.
        priors, mcmc_cfg: Passed to the estimator.
        estimator: Callable (window_returns, priors, mcmc_cfg, seed) ->
            PosteriorSummary. Must be picklable when parallelism > 1.
        parallelism: Worker processes; 1 runs windows in order, in-process.
        progress: Called as progress(done, total, date, summary) after each
            completed window.

    Returns:
        ParamTimeSeries, one row per window, missing rows as None.

    Raises:
        WindowTooShortError: Fewer than window + 1 returns.
    """
    priors = priors or Priors()
    mcmc_cfg = mcmc_cfg or McmcConfig()
    total = window_count(len(returns), cfg.window, cfg.step)
    if total == 0:
        raise WindowTooShortError(
            f"series shorter than window: {len(returns)} returns, "
            f"window {cfg.window} needs at least {cfg.window + 1}")

    n = cfg.window
    dates = pd.DatetimeIndex(returns.dates)[n::cfg.step]
    results = [None] * total
    logger.info("Estimating %d windows of %d returns (step %d, %d worker(s))",
                total, n, cfg.step, parallelism)

    tasks = _window_tasks(returns, cfg, priors, mcmc_cfg)
    if parallelism <= 1:
        for done, task in enumerate(tasks, 1):
            index, summary = _run_window(estimator, *task)
            results[index] = summary
            if progress:
                progress(done, total, dates[index], summary)
    else:
        loop = asyncio.get_running_loop()
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            futures = [loop.run_in_executor(pool, _run_window, estimator, *task)
                       for task in tasks]
            for done, future in enumerate(asyncio.as_completed(futures), 1):
                index, summary = await future
                results[index] = summary
                if progress:
                    progress(done, total, dates[index], summary)

    n_missing = sum(row is None for row in results)
    if n_missing:
        logger.warning("%d of %d windows recorded as missing", n_missing, total)
    return ParamTimeSeries(dates=pd.DatetimeIndex(dates, name="date"),
                           rows=tuple(results), window=n)


def rolling_estimate(returns: ReturnSeries, cfg: RollingConfig,
                     priors: Optional[Priors] = None,
                     mcmc_cfg: Optional[McmcConfig] = None,
                     **kwargs) -> ParamTimeSeries:
    """Synchronous wrapper around rolling_estimate_async."""
    return asyncio.run(rolling_estimate_async(returns, cfg, priors, mcmc_cfg,
                                              **kwargs))


def moving_average(series, w: int = MA_WIDTH) -> np.ndarray:
    """
    Trailing mean of the last `w` available values.

    Missing entries (None / NaN) are skipped. Before `w` values are
    available the mean of those available is emitted. A missing position
    repeats the value of the previous available one; leading missing
    positions stay NaN.
    """
    if w < 1:
        raise ValueError(f"moving average width must be >= 1, got {w}")
    values = pd.Series(series, dtype=float)
    available = values.dropna()
    smoothed = available.rolling(w, min_periods=1).mean()
    return smoothed.reindex(values.index).ffill().to_numpy()


def smooth_series(series: ParamTimeSeries, w: int = MA_WIDTH) -> ParamTimeSeries:
    """Apply moving_average to every column of a parameter series."""
    frame = series.to_frame()
    smoothed = pd.DataFrame({column: moving_average(frame[column].to_numpy(), w)
                             for column in frame.columns}, index=frame.index)
    return ParamTimeSeries.from_frame(smoothed, window=series.window)
