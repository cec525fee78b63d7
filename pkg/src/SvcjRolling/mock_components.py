"""
Mock components for end-to-end testing without running the MCMC sampler.
These estimators share the signature of estimate_window and return in
milliseconds, so rolling pipelines can be checked quickly.
"""

import logging

import numpy as np

from .estimator import SamplerDiagnostics, summarize
from .settings import PARAM_NAMES

# Configure logging
logger = logging.getLogger(__name__)

# Returns farther than this many sd from the mean count as jumps
JUMP_THRESHOLD = 3.0
BOOTSTRAP_DRAWS = 40


def _clip(value, low, high):
    return float(min(max(value, low), high))


def moment_estimates(y) -> np.ndarray:
    """Crude SVCJ parameters from sample moments, in PARAM_NAMES order."""
    y = np.asarray(y, dtype=float)
    mean = y.mean()
    sd = y.std() or 1.0
    jumps = np.abs(y - mean) > JUMP_THRESHOLD * sd
    lam = _clip(jumps.mean(), 1e-3, 0.5)
    tails = y[jumps]
    mu_y = float(tails.mean()) if tails.size else 0.0
    sigma_y = float(tails.std()) if tails.size > 1 else sd

    squared = (y - mean) ** 2
    var = squared.mean()
    beta = 0.0
    rho = 0.0
    if squared[:-1].std() > 0 and squared[1:].std() > 0:
        beta = _clip(np.corrcoef(squared[:-1], squared[1:])[0, 1], -0.99, 0.99)
        rho = _clip(np.corrcoef(y[:-1], squared[1:])[0, 1], -0.99, 0.99)
    alpha = var * (1.0 - beta)
    sigma_v = float(np.std(np.diff(squared)) / np.sqrt(var)) if var > 0 else 0.1

    return np.array([mean, mu_y, sigma_y, lam, alpha, beta, rho,
                     max(sigma_v, 1e-3), 0.0, max(var, 1e-3)])


class MockEstimator:
    """
    Moment-based stand-in for estimate_window.

    Posterior sds come from a small bootstrap seeded with `seed`, so the
    output depends on (returns, seed) only. Instances are picklable.
    """

    def __init__(self, n_draws: int = BOOTSTRAP_DRAWS):
        self.n_draws = n_draws

    def __call__(self, returns, priors=None, cfg=None, seed: int = 0):
        y = np.asarray(returns, dtype=float)
        logger.debug("[TEST MODE] Moment estimate of a window of %d returns", len(y))
        rng = np.random.default_rng(seed)
        chain = np.empty((self.n_draws, len(PARAM_NAMES)))
        for i in range(self.n_draws):
            chain[i] = moment_estimates(rng.choice(y, size=len(y), replace=True))
        # the point estimate replaces the bootstrap mean
        chain += moment_estimates(y) - chain.mean(axis=0)
        diagnostics = SamplerDiagnostics(acceptance_rate=1.0,
                                         mean_jumps=float(chain[:, 3].mean() * len(y)),
                                         n_draws=self.n_draws, v_proposal_sd=0.0)
        return summarize(chain, diagnostics=diagnostics)


class RecordingEstimator:
    """Delegates to MockEstimator and records every window it is given."""

    def __init__(self):
        self.calls = []
        self._delegate = MockEstimator()

    def __call__(self, returns, priors=None, cfg=None, seed: int = 0):
        self.calls.append((np.array(returns, dtype=float), seed))
        return self._delegate(returns, priors, cfg, seed)
