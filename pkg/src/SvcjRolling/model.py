"""
Euler-discretized SVCJ model.

    Y_t = mu + sqrt(V_{t-1}) eps_y + Z_y J_t
    V_t = alpha + beta V_{t-1} + sigma_v sqrt(V_{t-1}) eps_v + Z_v J_t

with corr(eps_y, eps_v) = rho, J_t ~ Bernoulli(lambda), Z_v ~ Exp(mean mu_v)
and Z_y | Z_v ~ N(mu_y + rho_j Z_v, sigma_y^2).
"""

import logging
from dataclasses import dataclass, fields
from typing import Mapping, Optional

import numpy as np

from .errors import NonStationaryError, ValidationError
from .settings import PARAM_NAMES

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SvcjParams:
    mu: float
    mu_y: float
    sigma_y: float
    lam: float
    alpha: float
    beta: float
    rho: float
    sigma_v: float
    rho_j: float
    mu_v: float

    def as_dict(self) -> dict:
        """Parameters keyed by their file column names (`lam` -> `lambda`)."""
        return dict(zip(PARAM_NAMES, self.as_tuple()))

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, f.name) for f in fields(self))

    @classmethod
    def from_mapping(cls, values: Mapping[str, float]) -> "SvcjParams":
        """
        Build parameters from a mapping keyed by column names.

        Args:
            values: Mapping with the ten keys of PARAM_NAMES. `lam` is
                accepted in place of `lambda`.

        Raises:
            ValidationError: If a key is missing or unknown.
        """
        values = dict(values)
        if "lam" in values and "lambda" not in values:
            values["lambda"] = values.pop("lam")
        missing = [name for name in PARAM_NAMES if name not in values]
        unknown = [name for name in values if name not in PARAM_NAMES]
        if missing or unknown:
            raise ValidationError(
                [f"missing {name}" for name in missing]
                + [f"unknown {name}" for name in unknown])
        return cls(*(float(values[name]) for name in PARAM_NAMES))


@dataclass(frozen=True)
class LatentPath:
    """Simulated returns with the latent states that generated them."""
    v: np.ndarray
    j: np.ndarray
    zy: np.ndarray
    zv: np.ndarray
    y: np.ndarray

    def __len__(self):
        return len(self.y)


@dataclass(frozen=True)
class ImpliedMoments:
    mean_return: float
    # None when |beta| >= 1
    stationary_mean_v: Optional[float]


def validate_params(p: SvcjParams, allow_degenerate: bool = False) -> None:
    """
    Check the SVCJ parameter constraints.

    Args:
        p: Parameters to check.
        allow_degenerate: Accept sigma_v = 0 (the deterministic variance
            recursion used by simulation).

    Raises:
        ValidationError: Listing every violated constraint.
    """
    violations = []
    values = p.as_dict()
    for name, value in values.items():
        if not np.isfinite(value):
            violations.append(f"{name} must be finite")
    if not 0.0 <= p.lam <= 1.0:
        violations.append("lambda must lie in [0, 1]")
    if not p.sigma_y > 0:
        violations.append("sigma_y must be > 0")
    if allow_degenerate:
        if not p.sigma_v >= 0:
            violations.append("sigma_v must be >= 0")
    elif not p.sigma_v > 0:
        violations.append("sigma_v must be > 0")
    if not p.mu_v > 0:
        violations.append("mu_v must be > 0")
    if not -1.0 < p.rho < 1.0:
        violations.append("rho must lie in (-1, 1)")
    if violations:
        raise ValidationError(violations)

    if abs(p.beta) >= 1:
        logger.warning("beta=%s: variance recursion is not stationary", p.beta)


def implied_moments(p: SvcjParams) -> ImpliedMoments:
    mean_return = p.mu + p.lam * (p.mu_y + p.rho_j * p.mu_v)
    mean_v = None
    if abs(p.beta) < 1:
        mean_v = (p.alpha + p.lam * p.mu_v) / (1.0 - p.beta)
    return ImpliedMoments(mean_return=mean_return, stationary_mean_v=mean_v)


def stationary_mean_v(p: SvcjParams) -> float:
    """
    Stationary mean of V, (alpha + lambda mu_v) / (1 - beta).

    Raises:
        NonStationaryError: If |beta| >= 1.
    """
    moments = implied_moments(p)
    if moments.stationary_mean_v is None:
        raise NonStationaryError(f"nonstationary: |beta| = {abs(p.beta)} >= 1")
    return moments.stationary_mean_v


def default_v0(p: SvcjParams) -> float:
    if abs(p.beta) < 1:
        return max(0.0, p.alpha / (1.0 - p.beta))
    return 1.0


def simulate_path(p: SvcjParams, v0: Optional[float], horizon: int,
                  seed: int) -> LatentPath:
    """
    Simulate the discretized model with full truncation of V at zero.

    Args:
        p: Model parameters (sigma_v = 0 is accepted).
        v0: Initial variance V_0; None selects default_v0(p).
        horizon: Number of steps T >= 1.
        seed: Seed for numpy's default generator.

    Returns:
        LatentPath of length `horizon`. Jump sizes are 0 where J_t = 0.

    Raises:
        ValidationError: On invalid parameters, horizon or v0.
    """
    validate_params(p, allow_degenerate=True)
    if horizon < 1:
        raise ValidationError([f"horizon must be >= 1, got {horizon}"])
    if v0 is None:
        v0 = default_v0(p)
    if not v0 >= 0:
        raise ValidationError([f"v0 must be >= 0, got {v0}"])

    rng = np.random.default_rng(seed)
    j = (rng.random(horizon) < p.lam).astype(np.int8)
    zv = rng.exponential(p.mu_v, horizon) * j
    zy = (p.mu_y + p.rho_j * zv + p.sigma_y * rng.standard_normal(horizon)) * j
    shocks = rng.standard_normal((horizon, 2))
    eps_y = shocks[:, 0]
    eps_v = p.rho * shocks[:, 0] + np.sqrt(1.0 - p.rho ** 2) * shocks[:, 1]

    v = np.empty(horizon)
    y = np.empty(horizon)
    v_prev = float(v0)
    for t in range(horizon):
        root = np.sqrt(v_prev)
        y[t] = p.mu + root * eps_y[t] + zy[t]
        v_prev = max(0.0, p.alpha + p.beta * v_prev
                     + p.sigma_v * root * eps_v[t] + zv[t])
        v[t] = v_prev

    for arr in (v, j, zy, zv, y):
        arr.flags.writeable = False
    return LatentPath(v=v, j=j, zy=zy, zv=zv, y=y)
