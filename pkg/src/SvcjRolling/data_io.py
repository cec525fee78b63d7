"""
CSV ingestion and output.

Input prices are `date,price` files with ISO-8601 dates. Parameter series
are written with one row per estimation date and the columns
`date, <ten parameters>, <ten parameters>_sd`. Floats are written with 12
significant digits, missing values as empty cells.
"""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import (DuplicateDateError, EmptySeriesError, OrderError,
                     ParseError, PriceValueError, SchemaError)
from .settings import PARAM_NAMES, RETURN_SCALE, SIMULATION_S0

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"
DATE_FORMAT = "%Y-%m-%d"
SD_NAMES = tuple(f"{name}_sd" for name in PARAM_NAMES)
PARAM_COLUMNS = PARAM_NAMES + SD_NAMES


@dataclass(frozen=True, eq=False)
class PriceSeries:
    dates: pd.DatetimeIndex
    prices: np.ndarray

    def __len__(self):
        return len(self.prices)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"price": self.prices},
                            index=pd.Index(self.dates, name="date"))


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    # dates[t] is the date of the closing price of return t
    dates: pd.DatetimeIndex
    returns: np.ndarray
    scale: float

    def __len__(self):
        return len(self.returns)


def _write_frame(frame: pd.DataFrame, path) -> Path:
    path = Path(path)
    frame.to_csv(path, float_format=FLOAT_FORMAT, na_rep="",
                 date_format=DATE_FORMAT, lineterminator="\n")
    logger.info("Wrote %d rows to %s", len(frame), path)
    return path


def load_prices(path) -> PriceSeries:
    """
    Read a `date,price` CSV file.

    Extra columns are ignored, so simulation output can be read back.

    Args:
        path: CSV file, UTF-8, header mandatory.

    Returns:
        PriceSeries with strictly increasing dates and positive prices.

    Raises:
        ParseError: Malformed file or row, missing column, bad date.
        PriceValueError: Non-numeric or non-positive price.
        DuplicateDateError: A date appears twice.
        OrderError: Dates are not increasing.
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False,
                            encoding="utf-8", skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise ParseError(f"{path}: empty file, expected header 'date,price'")
    except pd.errors.ParserError as e:
        raise ParseError(f"{path}: malformed CSV: {str(e).strip().splitlines()[0]}")

    frame.columns = [str(c).strip() for c in frame.columns]
    missing = [c for c in ("date", "price") if c not in frame.columns]
    if missing:
        raise ParseError(f"{path}: missing column(s) {', '.join(missing)}")

    incomplete = frame[["date", "price"]].isna().any(axis=1)
    if incomplete.any():
        row = int(np.flatnonzero(incomplete.to_numpy())[0])
        raise ParseError(f"{path}: row {row + 2} has missing fields")

    raw_dates = frame["date"].str.strip()
    dates = pd.to_datetime(raw_dates, format=DATE_FORMAT, errors="coerce")
    if dates.isna().any():
        row = int(np.flatnonzero(dates.isna().to_numpy())[0])
        raise ParseError(
            f"{path}: row {row + 2} has bad date {raw_dates.iloc[row]!r}")

    raw_prices = frame["price"].str.strip()
    prices = pd.to_numeric(raw_prices, errors="coerce").to_numpy(dtype=float)
    bad = ~np.isfinite(prices)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise PriceValueError(
            f"{path}: row {row + 2} has non-numeric price {raw_prices.iloc[row]!r}")
    if (prices <= 0).any():
        row = int(np.flatnonzero(prices <= 0)[0])
        raise PriceValueError(
            f"{path}: row {row + 2} has non-positive price {prices[row]}")

    dates = pd.DatetimeIndex(dates)
    if dates.has_duplicates:
        dup = dates[dates.duplicated()][0]
        raise DuplicateDateError(f"{path}: duplicate date {dup:%Y-%m-%d}")
    steps = np.diff(dates.asi8)
    if (steps <= 0).any():
        row = int(np.flatnonzero(steps <= 0)[0]) + 1
        raise OrderError(
            f"{path}: row {row + 2} date {dates[row]:%Y-%m-%d} does not "
            f"follow {dates[row - 1]:%Y-%m-%d}")

    logger.info("Loaded %d prices from %s", len(prices), path)
    prices.flags.writeable = False
    return PriceSeries(dates=pd.DatetimeIndex(dates, name="date"), prices=prices)


def log_returns(prices: PriceSeries, scale: float = RETURN_SCALE) -> ReturnSeries:
    """
    Scaled log returns between consecutive rows, whatever the calendar gap.

    Raises:
        EmptySeriesError: Fewer than two prices.
        ValueError: Non-positive scale.
    """
    if len(prices) < 2:
        raise EmptySeriesError(
            f"log returns need at least 2 prices, got {len(prices)}")
    if not scale > 0:
        raise ValueError(f"scale must be > 0, got {scale}")
    values = np.asarray(prices.prices, dtype=float)
    returns = scale * np.log(values[1:] / values[:-1])
    returns.flags.writeable = False
    return ReturnSeries(dates=prices.dates[1:], returns=returns, scale=float(scale))


def prices_from_returns(returns, start_date=None, scale: float = RETURN_SCALE,
                        s0: float = SIMULATION_S0, dates=None) -> PriceSeries:
    """
    Rebuild a price path S_t = s0 * exp(cumsum(y) / scale).

    The path has one more point than `returns`; dates are daily from
    `start_date` unless `dates` (one per price) is given.
    """
    returns = np.asarray(returns, dtype=float)
    log_path = np.concatenate([[0.0], np.cumsum(returns / scale)])
    prices = s0 * np.exp(log_path)
    if dates is None:
        dates = pd.date_range(start=start_date, periods=len(prices), freq="D")
    return PriceSeries(dates=pd.DatetimeIndex(dates, name="date"), prices=prices)


def write_param_series(series, path) -> Path:
    """Write a ParamTimeSeries with the parameter CSV schema."""
    return _write_frame(series.to_frame(), path)


def read_param_series(path, window=None):
    """
    Read a parameter CSV back into a ParamTimeSeries.

    Raises:
        SchemaError: Missing or unknown columns, or unreadable dates.
        OSError: The file cannot be read.
    """
    from .rolling import ParamTimeSeries

    try:
        frame = pd.read_csv(path, dtype={"date": str})
    except pd.errors.EmptyDataError:
        raise SchemaError(f"{path}: empty file, expected a header")
    columns = list(frame.columns)
    missing = [c for c in ("date",) + PARAM_COLUMNS if c not in columns]
    unknown = [c for c in columns if c != "date" and c not in PARAM_COLUMNS]
    if missing or unknown:
        parts = []
        if missing:
            parts.append(f"missing {', '.join(missing)}")
        if unknown:
            parts.append(f"unknown {', '.join(unknown)}")
        raise SchemaError(f"{path}: " + "; ".join(parts))

    dates = pd.to_datetime(frame["date"], format=DATE_FORMAT, errors="coerce")
    if dates.isna().any():
        raise SchemaError(f"{path}: unreadable date column")
    values = frame[list(PARAM_COLUMNS)].apply(pd.to_numeric, errors="coerce")
    values.index = pd.DatetimeIndex(dates, name="date")
    return ParamTimeSeries.from_frame(values, window=window)


def write_cluster_result(result, labels_path, centroids_path) -> tuple:
    """Write `date,label` and `label,<dims>,<dims>_scaled` files."""
    return (_write_frame(result.labels_frame(), labels_path),
            _write_frame(result.centroids_frame(), centroids_path))


def write_overlay(frame: pd.DataFrame, path) -> Path:
    return _write_frame(frame, path)


def write_latent_summary(returns: ReturnSeries, latent, path) -> Path:
    frame = pd.DataFrame(
        {"return": returns.returns, "v_mean": latent.v_mean,
         "jump_prob": latent.jump_prob},
        index=pd.Index(returns.dates, name="date"))
    return _write_frame(frame, path)


def write_simulation(prices: PriceSeries, path_latent, path) -> Path:
    """
    Write simulated prices with the latent columns of each step.

    The first row carries the starting price; its latent cells are empty.
    """
    frame = prices.to_frame()
    for name in ("v", "j", "zy", "zv", "y"):
        column = np.asarray(getattr(path_latent, name), dtype=float)
        frame[name] = np.concatenate([[np.nan], column])
    return _write_frame(frame, path)


def write_elbow_curve(wcss_curve, path) -> Path:
    """Write `k,wcss` rows, k starting at 1."""
    frame = pd.DataFrame({"wcss": np.asarray(wcss_curve, dtype=float)},
                         index=pd.RangeIndex(1, len(wcss_curve) + 1, name="k"))
    return _write_frame(frame, path)
