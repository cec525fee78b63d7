"""
Bayesian estimation of the SVCJ parameters on one window of returns.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (ConfigError, EmptySeriesError, NonFiniteInputError,
                     NumericalError, WindowTooShortError)
from .mcmc import McmcConfig, Priors, gibbs_sweep, initial_state
from .model import SvcjParams
from .settings import MIN_WINDOW, PARAM_NAMES, QUANTILE_LEVELS

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SamplerDiagnostics:
    # mean V-update acceptance over retained sweeps
    acceptance_rate: float
    # mean sum of J_t per retained sweep
    mean_jumps: float
    n_draws: int
    v_proposal_sd: float


@dataclass(frozen=True, eq=False)
class LatentSummary:
    """Posterior mean of V_t and P(J_t = 1), aligned with the returns."""
    v_mean: np.ndarray
    jump_prob: np.ndarray


@dataclass(frozen=True, eq=False)
class PosteriorSummary:
    mean: SvcjParams
    sd: dict
    quantiles: dict = field(default_factory=dict)
    quantile_levels: tuple = QUANTILE_LEVELS
    diagnostics: Optional[SamplerDiagnostics] = None
    latent: Optional[LatentSummary] = None

    def as_row(self) -> dict:
        """Posterior means and `_sd` columns, in file column order."""
        row = self.mean.as_dict()
        row.update({f"{name}_sd": self.sd[name] for name in PARAM_NAMES})
        return row

    def table(self) -> list:
        """Rows of (parameter, mean, sd, quantiles...) for display."""
        means = self.mean.as_dict()
        rows = []
        for name in PARAM_NAMES:
            quantiles = self.quantiles.get(name, ())
            rows.append([name, means[name], self.sd[name], *quantiles])
        return rows

    def table_headers(self) -> list:
        levels = [f"q{level * 100:g}" for level in self.quantile_levels] \
            if self.quantiles else []
        return ["parameter", "mean", "sd", *levels]


def summarize(chain, quantile_levels=QUANTILE_LEVELS, diagnostics=None,
              latent=None) -> PosteriorSummary:
    """
    Summarize retained draws.

    Args:
        chain: Array (n_draws, 10) with columns in PARAM_NAMES order.
        quantile_levels: Levels for empirical quantiles (linear
            interpolation).

    Returns:
        PosteriorSummary with arithmetic means, sample sd and quantiles.

    Raises:
        EmptySeriesError: Fewer than two draws.
    """
    chain = np.asarray(chain, dtype=float)
    if chain.size == 0:
        raise EmptySeriesError("empty chain")
    if chain.ndim != 2 or chain.shape[1] != len(PARAM_NAMES):
        raise ValueError(f"chain must have shape (n, {len(PARAM_NAMES)}), "
                         f"got {chain.shape}")
    if len(chain) < 2:
        raise EmptySeriesError(f"need at least 2 draws, got {len(chain)}")

    means = chain.mean(axis=0)
    sds = np.where(np.ptp(chain, axis=0) == 0, 0.0, chain.std(axis=0, ddof=1))
    levels = tuple(float(level) for level in quantile_levels)
    quantiles = np.quantile(chain, levels, axis=0)

    return PosteriorSummary(
        mean=SvcjParams(*(float(m) for m in means)),
        sd={name: float(sds[i]) for i, name in enumerate(PARAM_NAMES)},
        quantiles={name: tuple(float(q) for q in quantiles[:, i])
                   for i, name in enumerate(PARAM_NAMES)},
        quantile_levels=levels,
        diagnostics=diagnostics,
        latent=latent,
    )


def _check_window(y):
    if y.ndim != 1:
        raise ValueError(f"returns must be one-dimensional, got shape {y.shape}")
    if len(y) < MIN_WINDOW:
        raise WindowTooShortError(
            f"window too short: {len(y)} returns, need at least {MIN_WINDOW}")
    if not np.all(np.isfinite(y)):
        raise NonFiniteInputError("returns contain non-finite values")
    if np.ptp(y) == 0:
        raise NumericalError("degenerate window: returns are constant")


def estimate_window(returns, priors: Optional[Priors] = None,
                    cfg: Optional[McmcConfig] = None, seed: int = 0, *,
                    keep_latent: bool = False) -> PosteriorSummary:
    """
    Run one chain on a window of returns and summarize it.

    The V proposal sd is adapted every `cfg.tune_interval` sweeps during
    burn-in and frozen afterwards.

    Args:
        returns: Window returns, at least 30 finite values.
        priors: Prior hyperparameters (defaults when None).
        cfg: Chain settings (defaults when None).
        seed: Seed of the chain's own generator.
        keep_latent: Also accumulate posterior means of V_t and P(J_t = 1).

    Returns:
        PosteriorSummary of the retained draws.

    Raises:
        WindowTooShortError, NonFiniteInputError: Invalid input.
        NumericalError: Degenerate window.
    """
    y = np.asarray(returns, dtype=float)
    _check_window(y)
    priors = priors or Priors()
    cfg = cfg or McmcConfig()
    if cfg.n_retained < 2:
        raise ConfigError(
            f"mcmc settings retain {cfg.n_retained} draws, need at least 2")

    rng = np.random.default_rng(seed)
    state = initial_state(y, priors, cfg)
    low, high = cfg.target_acceptance

    draws = np.empty((cfg.n_retained, len(PARAM_NAMES)))
    kept = 0
    acceptance_sum = 0.0
    jump_sum = 0.0
    tune_acceptance = []
    v_sum = np.zeros(len(y)) if keep_latent else None
    j_sum = np.zeros(len(y)) if keep_latent else None

    for sweep in range(cfg.n_iter):
        gibbs_sweep(state, y, priors, rng, cfg=cfg)

        if sweep < cfg.burn_in:
            tune_acceptance.append(state.v_acceptance)
            if len(tune_acceptance) == cfg.tune_interval:
                rate = float(np.mean(tune_acceptance))
                if rate > high:
                    state.v_proposal_sd *= 1.1
                elif rate < low:
                    state.v_proposal_sd *= 0.9
                logger.debug("sweep %d: V acceptance %.3f, proposal sd %.4f",
                             sweep + 1, rate, state.v_proposal_sd)
                tune_acceptance = []
            continue

        if (sweep - cfg.burn_in) % cfg.thin:
            continue
        draws[kept] = state.draw()
        kept += 1
        acceptance_sum += state.v_acceptance
        jump_sum += float(state.j.sum())
        if keep_latent:
            v_sum += state.v[1:]
            j_sum += state.j

    diagnostics = SamplerDiagnostics(
        acceptance_rate=acceptance_sum / kept,
        mean_jumps=jump_sum / kept,
        n_draws=kept,
        v_proposal_sd=state.v_proposal_sd,
    )
    latent = None
    if keep_latent:
        latent = LatentSummary(v_mean=v_sum / kept, jump_prob=j_sum / kept)

    logger.debug("window of %d returns: %d draws, V acceptance %.3f, "
                 "%.1f jumps per sweep", len(y), kept,
                 diagnostics.acceptance_rate, diagnostics.mean_jumps)
    return summarize(draws, diagnostics=diagnostics, latent=latent)
