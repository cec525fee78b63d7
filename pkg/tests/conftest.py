import numpy as np
import pandas as pd
import pytest

from SvcjRolling.data_io import ReturnSeries
from SvcjRolling.estimator import PosteriorSummary
from SvcjRolling.model import SvcjParams
from SvcjRolling.rolling import ParamTimeSeries
from SvcjRolling.settings import PARAM_NAMES


@pytest.fixture
def example_params():
    return SvcjParams(mu=0.1, mu_y=-0.2, sigma_y=1.0, lam=0.05, alpha=0.1,
                      beta=0.5, rho=-0.3, sigma_v=0.2, rho_j=0.0, mu_v=1.0)


@pytest.fixture
def recovery_params():
    return SvcjParams(mu=0.1, mu_y=-0.5, sigma_y=2.0, lam=0.05, alpha=0.1,
                      beta=0.6, rho=-0.3, sigma_v=0.3, rho_j=-0.5, mu_v=1.0)


@pytest.fixture
def write_prices(tmp_path):
    """Write `date,price` rows (or raw text) to a CSV and return its path."""

    def _write(rows, name="prices.csv"):
        path = tmp_path / name
        if isinstance(rows, str):
            path.write_text(rows, encoding="utf-8")
        else:
            lines = ["date,price"] + [f"{d},{p}" for d, p in rows]
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    return _write


@pytest.fixture
def make_returns():
    def _make(values, start="2020-01-01"):
        values = np.asarray(values, dtype=float)
        return ReturnSeries(dates=pd.date_range(start, periods=len(values), freq="D"),
                            returns=values, scale=100.0)

    return _make


@pytest.fixture
def make_summary():
    """PosteriorSummary with the given parameter overrides and sd 0.1."""

    def _make(**overrides):
        values = dict(mu=0.0, mu_y=-0.5, sigma_y=2.0, lam=0.05, alpha=0.1,
                      beta=0.5, rho=-0.3, sigma_v=0.3, rho_j=0.0, mu_v=1.0)
        values.update(overrides)
        return PosteriorSummary(mean=SvcjParams(**values),
                                sd={name: 0.1 for name in PARAM_NAMES})

    return _make


@pytest.fixture
def make_series(make_summary):
    """ParamTimeSeries from a list of override dicts (None for missing rows)."""

    def _make(rows, start="2021-01-01", window=150):
        dates = pd.date_range(start, periods=len(rows), freq="D", name="date")
        summaries = tuple(None if row is None else make_summary(**row)
                          for row in rows)
        return ParamTimeSeries(dates=dates, rows=summaries, window=window)

    return _make
