"""
Gibbs sampler with data augmentation for the discretized SVCJ model.

The state carries the parameters in the (psi, omega) parameterization of
the variance shock, psi = sigma_v * rho and omega = sigma_v^2 (1 - rho^2),
together with the latent variance path V_0..V_T, the jump indicators and
the jump sizes (0 at non-jump steps).

Conditioning on the return residual r_y, the variance equation reads

    V_t - alpha - beta V_{t-1} - J_t Z_v = psi r_y + sqrt(omega V_{t-1}) eta_t

which makes every parameter block conjugate.
"""

import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
import pandas as pd
from scipy import linalg
from scipy.special import expit, log_ndtr
from scipy.stats import invgamma, truncnorm

from .errors import ConfigError, NumericalError
from .model import SvcjParams
from .settings import (BURN_IN, INIT_VARIANCE_SPAN, N_ITER, PRIOR_ALPHA,
                       PRIOR_ALPHA_BETA_COV, PRIOR_BETA, PRIOR_LAMBDA,
                       PRIOR_MU, PRIOR_MU_V, PRIOR_MU_Y, PRIOR_OMEGA,
                       PRIOR_PSI, PRIOR_RHO_J, PRIOR_SIGMA_Y_SQ,
                       TARGET_ACCEPTANCE, THIN, TUNE_INTERVAL, V_FLOOR,
                       V_PROPOSAL_SD)

logger = logging.getLogger(__name__)

LOG_2PI = np.log(2.0 * np.pi)

# Sweep steps, in execution order
SWEEP_STEPS = (
    "jumps",            # (J_t, Z_t) block, sizes integrated out for J
    "jump_size_y",      # Z_y | Z_v
    "jump_size_v",      # Z_v | Z_y
    "lambda",
    "jump_mean",        # (mu_y, rho_j)
    "jump_var",         # sigma_y^2
    "mu_v",
    "mu",
    "vol_regression",   # (alpha, beta)
    "vol_shocks",       # (psi, omega)
    "volatility",       # V_0..V_T
)
LATENT_STEPS = ("jumps", "jump_size_y", "jump_size_v", "volatility")


@dataclass(frozen=True)
class Priors:
    mu_mean: float = PRIOR_MU[0]
    mu_var: float = PRIOR_MU[1]
    mu_y_mean: float = PRIOR_MU_Y[0]
    mu_y_var: float = PRIOR_MU_Y[1]
    sigma_y_sq_shape: float = PRIOR_SIGMA_Y_SQ[0]
    sigma_y_sq_scale: float = PRIOR_SIGMA_Y_SQ[1]
    lambda_a: float = PRIOR_LAMBDA[0]
    lambda_b: float = PRIOR_LAMBDA[1]
    alpha_mean: float = PRIOR_ALPHA[0]
    alpha_var: float = PRIOR_ALPHA[1]
    beta_mean: float = PRIOR_BETA[0]
    beta_var: float = PRIOR_BETA[1]
    alpha_beta_cov: float = PRIOR_ALPHA_BETA_COV
    mu_v_shape: float = PRIOR_MU_V[0]
    mu_v_scale: float = PRIOR_MU_V[1]
    rho_j_mean: float = PRIOR_RHO_J[0]
    rho_j_var: float = PRIOR_RHO_J[1]
    psi_mean: float = PRIOR_PSI[0]
    # psi | omega ~ N(psi_mean, psi_var_ratio * omega)
    psi_var_ratio: float = PRIOR_PSI[1]
    omega_shape: float = PRIOR_OMEGA[0]
    omega_scale: float = PRIOR_OMEGA[1]

    def __post_init__(self):
        positive = ("mu_var", "mu_y_var", "sigma_y_sq_shape",
                    "sigma_y_sq_scale", "lambda_a", "lambda_b", "alpha_var",
                    "beta_var", "mu_v_shape", "mu_v_scale", "rho_j_var",
                    "psi_var_ratio", "omega_shape", "omega_scale")
        bad = [name for name in positive if not getattr(self, name) > 0]
        if bad:
            raise ConfigError(f"priors must be positive: {', '.join(bad)}")
        if self.alpha_beta_cov ** 2 >= self.alpha_var * self.beta_var:
            raise ConfigError("priors.alpha_beta_cov makes the (alpha, beta) "
                              "covariance singular or indefinite")

    @property
    def alpha_beta_mean_vector(self) -> np.ndarray:
        return np.array([self.alpha_mean, self.beta_mean])

    @property
    def alpha_beta_cov_matrix(self) -> np.ndarray:
        return np.array([[self.alpha_var, self.alpha_beta_cov],
                         [self.alpha_beta_cov, self.beta_var]])


@dataclass(frozen=True)
class McmcConfig:
    n_iter: int = N_ITER
    burn_in: int = BURN_IN
    thin: int = THIN
    v_proposal_sd: float = V_PROPOSAL_SD
    v_floor: float = V_FLOOR
    tune_interval: int = TUNE_INTERVAL
    target_acceptance: tuple = TARGET_ACCEPTANCE

    def __post_init__(self):
        if self.n_iter < 1:
            raise ConfigError(f"mcmc.n_iter must be >= 1, got {self.n_iter}")
        if not 0 <= self.burn_in < self.n_iter:
            raise ConfigError(
                f"mcmc.burn_in must lie in [0, n_iter), got {self.burn_in}")
        if self.thin < 1:
            raise ConfigError(f"mcmc.thin must be >= 1, got {self.thin}")
        if not self.v_proposal_sd > 0:
            raise ConfigError("mcmc.v_proposal_sd must be > 0")
        if not self.v_floor > 0:
            raise ConfigError("mcmc.v_floor must be > 0")
        if self.tune_interval < 1:
            raise ConfigError("mcmc.tune_interval must be >= 1")
        low, high = self.target_acceptance
        if not 0 < low < high < 1:
            raise ConfigError("mcmc.target_acceptance must satisfy 0 < low < high < 1")

    @property
    def n_retained(self) -> int:
        return len(range(self.burn_in, self.n_iter, self.thin))


@dataclass
class GibbsState:
    mu: float
    mu_y: float
    sigma_y_sq: float
    lam: float
    alpha: float
    beta: float
    psi: float
    omega: float
    rho_j: float
    mu_v: float
    # v[0] is V_0; v[t] follows return t
    v: np.ndarray
    j: np.ndarray
    zy: np.ndarray
    zv: np.ndarray
    v_proposal_sd: float = V_PROPOSAL_SD
    v_acceptance: float = float("nan")

    @property
    def sigma_v(self) -> float:
        return float(np.sqrt(self.psi ** 2 + self.omega))

    @property
    def rho(self) -> float:
        return float(self.psi / self.sigma_v)

    @property
    def sigma_y(self) -> float:
        return float(np.sqrt(self.sigma_y_sq))

    def params(self) -> SvcjParams:
        return SvcjParams(*self.draw())

    def draw(self) -> np.ndarray:
        """Current parameters as a vector in PARAM_NAMES order."""
        return np.array([self.mu, self.mu_y, self.sigma_y, self.lam,
                         self.alpha, self.beta, self.rho, self.sigma_v,
                         self.rho_j, self.mu_v])

    def copy(self) -> "GibbsState":
        return replace(self, v=self.v.copy(), j=self.j.copy(),
                       zy=self.zy.copy(), zv=self.zv.copy())

    @classmethod
    def from_params(cls, p: SvcjParams, v, j, zy, zv,
                    v_proposal_sd: float = V_PROPOSAL_SD,
                    v_floor: float = V_FLOOR) -> "GibbsState":
        """
        State at given parameters and latent paths (v has length T + 1).

        Variances below `v_floor`, such as the zeros of a fully truncated
        simulated path, are raised to it.
        """
        return cls(mu=p.mu, mu_y=p.mu_y, sigma_y_sq=p.sigma_y ** 2, lam=p.lam,
                   alpha=p.alpha, beta=p.beta, psi=p.sigma_v * p.rho,
                   omega=p.sigma_v ** 2 * (1.0 - p.rho ** 2), rho_j=p.rho_j,
                   mu_v=p.mu_v, v=np.maximum(np.asarray(v, dtype=float), v_floor),
                   j=np.array(j, dtype=np.int8), zy=np.array(zy, dtype=float),
                   zv=np.array(zv, dtype=float), v_proposal_sd=v_proposal_sd)


def _inverse_gamma_mean(shape, scale):
    # mode when the mean does not exist
    return scale / (shape - 1.0) if shape > 1 else scale / (shape + 1.0)


def initial_state(returns, priors: Priors, cfg: McmcConfig) -> GibbsState:
    """
    Starting point of a chain.

    V_t starts at a centered moving variance of the demeaned returns, J at 0
    and the parameters at their prior means, except (alpha, beta, omega)
    which are fitted to the starting V path by weighted least squares.
    """
    y = np.asarray(returns, dtype=float)
    demeaned = y - y.mean()
    moving_var = (pd.Series(demeaned ** 2)
                  .rolling(INIT_VARIANCE_SPAN, center=True, min_periods=1)
                  .mean().to_numpy())
    v = np.empty(len(y) + 1)
    v[1:] = np.maximum(cfg.v_floor, moving_var)
    v[0] = v[1]

    lag, cur = v[:-1], v[1:]
    root_w = 1.0 / np.sqrt(lag)
    design = np.column_stack([np.ones_like(lag), lag]) * root_w[:, None]
    (alpha, beta), *_ = np.linalg.lstsq(design, cur * root_w, rcond=None)
    resid = (cur - alpha - beta * lag) * root_w
    omega_prior = _inverse_gamma_mean(priors.omega_shape, priors.omega_scale)
    omega = max(float(np.mean(resid ** 2)), omega_prior)

    zeros = np.zeros(len(y))
    return GibbsState(
        mu=priors.mu_mean,
        mu_y=priors.mu_y_mean,
        sigma_y_sq=_inverse_gamma_mean(priors.sigma_y_sq_shape,
                                       priors.sigma_y_sq_scale),
        lam=priors.lambda_a / (priors.lambda_a + priors.lambda_b),
        alpha=float(alpha),
        beta=float(beta),
        psi=priors.psi_mean,
        omega=omega,
        rho_j=priors.rho_j_mean,
        mu_v=_inverse_gamma_mean(priors.mu_v_shape, priors.mu_v_scale),
        v=v,
        j=np.zeros(len(y), dtype=np.int8),
        zy=zeros.copy(),
        zv=zeros.copy(),
        v_proposal_sd=cfg.v_proposal_sd,
    )


# Conditional draws

def _check_variance(value, name):
    if not np.all(np.isfinite(value)) or np.any(np.asarray(value) <= 0):
        raise NumericalError(f"non-positive conditional variance in {name}")


def _draw_gaussian(precision, linear, rng, name):
    """Draw from N(precision^-1 linear, precision^-1)."""
    try:
        chol = linalg.cholesky(precision, lower=True)
    except (linalg.LinAlgError, ValueError):
        raise NumericalError(f"non-positive conditional variance in {name}")
    mean = linalg.cho_solve((chol, True), linear)
    noise = linalg.solve_triangular(chol.T, rng.standard_normal(len(linear)),
                                    lower=False)
    return mean + noise


def _draw_inverse_gamma(shape, scale, rng, name):
    _check_variance(scale, name)
    return float(invgamma.rvs(shape, scale=scale, random_state=rng))


def _truncated_normal(mean, sd, rng):
    """Normal(mean, sd^2) truncated to (0, inf), elementwise."""
    draws = truncnorm.rvs(-mean / sd, np.inf, loc=mean, scale=sd,
                          random_state=rng)
    return np.maximum(np.atleast_1d(draws), 0.0)


def draw_lambda(n_jumps, n_obs, priors: Priors, rng) -> float:
    """lambda ~ Beta(a + sum J, b + T - sum J)."""
    return float(rng.beta(priors.lambda_a + n_jumps,
                          priors.lambda_b + n_obs - n_jumps))


def draw_jump_regression(zy, zv, sigma_y_sq, priors: Priors, rng) -> tuple:
    """(mu_y, rho_j) from the normal regression of Z_y on (1, Z_v)."""
    zy = np.asarray(zy, dtype=float)
    zv = np.asarray(zv, dtype=float)
    design = np.column_stack([np.ones_like(zv), zv])
    prior_prec = np.diag([1.0 / priors.mu_y_var, 1.0 / priors.rho_j_var])
    prior_mean = np.array([priors.mu_y_mean, priors.rho_j_mean])
    precision = prior_prec + design.T @ design / sigma_y_sq
    linear = prior_prec @ prior_mean + design.T @ zy / sigma_y_sq
    mu_y, rho_j = _draw_gaussian(precision, linear, rng, "(mu_y, rho_j)")
    return float(mu_y), float(rho_j)


def draw_sigma_y_sq(residuals, priors: Priors, rng) -> float:
    residuals = np.asarray(residuals, dtype=float)
    shape = priors.sigma_y_sq_shape + 0.5 * len(residuals)
    scale = priors.sigma_y_sq_scale + 0.5 * float(residuals @ residuals)
    return _draw_inverse_gamma(shape, scale, rng, "sigma_y^2")


def draw_mu_v(zv, priors: Priors, rng) -> float:
    """mu_v | Z_v ~ IG(shape + n, scale + sum Z_v) over jump steps."""
    zv = np.asarray(zv, dtype=float)
    return _draw_inverse_gamma(priors.mu_v_shape + len(zv),
                               priors.mu_v_scale + float(zv.sum()), rng, "mu_v")


def draw_mu(y_net, lag_v, vol_resid, psi, omega, priors: Priors, rng) -> float:
    """
    Return drift given V and the jumps.

    Args:
        y_net: Returns less realized jumps, y_t - J_t Z_y.
        lag_v: V_{t-1}.
        vol_resid: Variance residual V_t - alpha - beta V_{t-1} - J_t Z_v.
        psi, omega: Variance shock parameters.
    """
    y_net = np.asarray(y_net, dtype=float)
    lag_v = np.asarray(lag_v, dtype=float)
    vol_resid = np.asarray(vol_resid, dtype=float)
    inv_w = 1.0 / lag_v
    precision = (1.0 / priors.mu_var + inv_w.sum()
                 + psi ** 2 * inv_w.sum() / omega)
    linear = (priors.mu_mean / priors.mu_var + (y_net * inv_w).sum()
              + psi * ((psi * y_net - vol_resid) * inv_w).sum() / omega)
    _check_variance(precision, "mu")
    return float(linear / precision + rng.standard_normal() / np.sqrt(precision))


def draw_alpha_beta(target, lag_v, omega, priors: Priors, rng) -> tuple:
    """(alpha, beta) from the weighted regression of the variance equation."""
    target = np.asarray(target, dtype=float)
    lag_v = np.asarray(lag_v, dtype=float)
    weights = 1.0 / (omega * lag_v)
    design = np.column_stack([np.ones_like(lag_v), lag_v])
    prior_prec = np.linalg.inv(priors.alpha_beta_cov_matrix)
    precision = prior_prec + design.T @ (design * weights[:, None])
    linear = (prior_prec @ priors.alpha_beta_mean_vector
              + design.T @ (target * weights))
    alpha, beta = _draw_gaussian(precision, linear, rng, "(alpha, beta)")
    return float(alpha), float(beta)


def draw_psi_omega(std_return_resid, std_vol_resid, priors: Priors, rng) -> tuple:
    """
    (psi, omega) from the normal / inverse-gamma pair.

    Args:
        std_return_resid: r_y / sqrt(V_{t-1}).
        std_vol_resid: r_v / sqrt(V_{t-1}), with r_v free of psi.
    """
    e = np.asarray(std_return_resid, dtype=float)
    u = np.asarray(std_vol_resid, dtype=float)
    c0 = 1.0 / priors.psi_var_ratio
    c_n = c0 + float(e @ e)
    psi_n = (c0 * priors.psi_mean + float(e @ u)) / c_n
    shape = priors.omega_shape + 0.5 * len(e)
    scale = priors.omega_scale + 0.5 * (float(u @ u) + c0 * priors.psi_mean ** 2
                                        - c_n * psi_n ** 2)
    omega = _draw_inverse_gamma(shape, scale, rng, "omega")
    psi = psi_n + np.sqrt(omega / c_n) * rng.standard_normal()
    return float(psi), omega


# Latent blocks

def _update_jumps(state: GibbsState, y, rng):
    """Draw (J_t, Z_v, Z_y) jointly; J uses the jump sizes integrated out."""
    w = state.v[:-1]
    a = y - state.mu
    b = state.v[1:] - state.alpha - state.beta * w
    psi, omega = state.psi, state.omega

    log_p0 = (-LOG_2PI - 0.5 * np.log(w * w * omega)
              - 0.5 * (a * a / w + (b - psi * a) ** 2 / (omega * w)))

    # (a, b) | Z_v, J=1 ~ N((mu_y + rho_j Z_v, Z_v), S)
    s11 = w + state.sigma_y_sq
    s12 = psi * w
    s22 = (psi * psi + omega) * w
    det = s11 * s22 - s12 * s12
    x1 = a - state.mu_y
    x2 = b
    d1 = state.rho_j
    q_xx = (s22 * x1 * x1 - 2.0 * s12 * x1 * x2 + s11 * x2 * x2) / det
    prec = (s22 * d1 * d1 - 2.0 * s12 * d1 + s11) / det
    lin = (s22 * d1 * x1 - s12 * (d1 * x2 + x1) + s11 * x2) / det - 1.0 / state.mu_v
    _check_variance(prec, "Z_v")
    log_p1 = (-LOG_2PI - 0.5 * np.log(det) - 0.5 * q_xx - np.log(state.mu_v)
              + 0.5 * (LOG_2PI - np.log(prec)) + 0.5 * lin * lin / prec
              + log_ndtr(lin / np.sqrt(prec)))

    with np.errstate(divide="ignore"):
        prior_odds = np.log(state.lam) - np.log1p(-state.lam)
    prob = expit(prior_odds + log_p1 - log_p0)
    jumps = rng.random(len(y)) < prob

    state.j = jumps.astype(np.int8)
    state.zv = np.zeros(len(y))
    state.zy = np.zeros(len(y))
    if jumps.any():
        sd = 1.0 / np.sqrt(prec[jumps])
        state.zv[jumps] = _truncated_normal(lin[jumps] / prec[jumps], sd, rng)
        _update_jump_size_y(state, y, rng)


def _update_jump_size_y(state: GibbsState, y, rng):
    jumps = state.j.astype(bool)
    if not jumps.any():
        return
    w = state.v[:-1][jumps]
    a = y[jumps] - state.mu
    b_net = state.v[1:][jumps] - state.alpha - state.beta * w - state.zv[jumps]
    psi, omega = state.psi, state.omega
    prec = 1.0 / w + psi ** 2 / (omega * w) + 1.0 / state.sigma_y_sq
    num = (a / w + psi * (psi * a - b_net) / (omega * w)
           + (state.mu_y + state.rho_j * state.zv[jumps]) / state.sigma_y_sq)
    _check_variance(prec, "Z_y")
    state.zy[jumps] = num / prec + rng.standard_normal(len(w)) / np.sqrt(prec)


def _update_jump_size_v(state: GibbsState, y, rng):
    jumps = state.j.astype(bool)
    if not jumps.any():
        return
    w = state.v[:-1][jumps]
    a_net = y[jumps] - state.mu - state.zy[jumps]
    b = state.v[1:][jumps] - state.alpha - state.beta * w
    psi, omega = state.psi, state.omega
    prec = state.rho_j ** 2 / state.sigma_y_sq + 1.0 / (omega * w)
    num = (state.rho_j * (state.zy[jumps] - state.mu_y) / state.sigma_y_sq
           + (b - psi * a_net) / (omega * w) - 1.0 / state.mu_v)
    _check_variance(prec, "Z_v")
    state.zv[jumps] = _truncated_normal(num / prec, 1.0 / np.sqrt(prec), rng)


def volatility_log_density(state: GibbsState, y, idx, values):
    """
    Log full conditional of V at sites `idx`, on the log-V scale.

    Only the equations touching each site enter: equation s (V_s as the
    current value) and equation s + 1 (V_s as the lag).
    """
    v = state.v
    n_obs = len(y)
    values = np.asarray(values, dtype=float)
    out = np.log(values)

    current = idx >= 1
    k = idx[current] - 1
    lag = v[k]
    r_y = y[k] - state.mu - state.j[k] * state.zy[k]
    r_v = (values[current] - state.alpha - state.beta * lag
           - state.j[k] * state.zv[k])
    out[current] -= (r_v - state.psi * r_y) ** 2 / (2.0 * state.omega * lag)

    lagged = idx <= n_obs - 1
    k = idx[lagged]
    val = values[lagged]
    r_y = y[k] - state.mu - state.j[k] * state.zy[k]
    r_v = v[k + 1] - state.alpha - state.beta * val - state.j[k] * state.zv[k]
    out[lagged] += (-np.log(val) - r_y ** 2 / (2.0 * val)
                    - (r_v - state.psi * r_y) ** 2 / (2.0 * state.omega * val))
    return out


def _update_volatility(state: GibbsState, y, rng, v_floor, log_density):
    """
    Random-walk Metropolis on log V, even sites then odd sites.

    Proposals below log(v_floor) are reflected back above it, which keeps
    the walk symmetric on [log(v_floor), inf).
    """
    n_sites = len(state.v)
    log_floor = np.log(v_floor)
    accepted = 0
    for parity in (0, 1):
        idx = np.arange(parity, n_sites, 2)
        current = state.v[idx]
        log_proposal = (np.log(current)
                        + state.v_proposal_sd * rng.standard_normal(len(idx)))
        log_proposal = np.where(log_proposal < log_floor,
                                2.0 * log_floor - log_proposal, log_proposal)
        proposal = np.exp(log_proposal)
        log_u = np.log(rng.random(len(idx)))
        log_ratio = (log_density(state, y, idx, proposal)
                     - log_density(state, y, idx, current))
        ok = log_u < log_ratio
        state.v[idx[ok]] = proposal[ok]
        accepted += int(ok.sum())
    state.v_acceptance = accepted / n_sites


def gibbs_sweep(state: GibbsState, returns, priors: Priors, rng, *,
                cfg: Optional[McmcConfig] = None, steps=SWEEP_STEPS,
                likelihood: bool = True,
                vol_log_density: Optional[Callable] = None) -> GibbsState:
    """
    One sweep over the blocks of SWEEP_STEPS, in that order.

    The state is updated in place and returned; variances below
    cfg.v_floor are raised to it first.

    Args:
        state: Current draws; len(state.v) == len(returns) + 1.
        returns: Window returns y_1..y_T.
        priors: Prior hyperparameters.
        rng: numpy Generator owned by the chain.
        cfg: Sampler settings (v_floor); defaults when None.
        steps: Subset of SWEEP_STEPS to run; other blocks stay fixed.
        likelihood: When False, parameter blocks see no data and latent
            blocks are skipped, so parameter draws come from the priors.
        vol_log_density: Replacement target for the V update, on the log-V
            scale, with the signature of volatility_log_density.

    Raises:
        NumericalError: A conditional variance is non-positive.
    """
    cfg = cfg or McmcConfig()
    y = np.asarray(returns, dtype=float)
    if len(state.v) != len(y) + 1:
        raise ValueError(
            f"state has {len(state.v)} variance sites for {len(y)} returns")
    np.maximum(state.v, cfg.v_floor, out=state.v)
    selected = set(steps)
    unknown = selected - set(SWEEP_STEPS)
    if unknown:
        raise ValueError(f"unknown sweep steps: {sorted(unknown)}")
    if not likelihood:
        selected -= set(LATENT_STEPS)

    jumps = state.j.astype(bool) if likelihood else np.zeros(0, dtype=bool)
    empty = np.zeros(0)

    for step in SWEEP_STEPS:
        if step not in selected:
            continue
        if step == "jumps":
            _update_jumps(state, y, rng)
            jumps = state.j.astype(bool)
        elif step == "jump_size_y":
            _update_jump_size_y(state, y, rng)
        elif step == "jump_size_v":
            _update_jump_size_v(state, y, rng)
        elif step == "lambda":
            n_obs = len(y) if likelihood else 0
            state.lam = draw_lambda(int(jumps.sum()), n_obs, priors, rng)
        elif step == "jump_mean":
            zy = state.zy[jumps] if likelihood else empty
            zv = state.zv[jumps] if likelihood else empty
            state.mu_y, state.rho_j = draw_jump_regression(
                zy, zv, state.sigma_y_sq, priors, rng)
        elif step == "jump_var":
            resid = (state.zy[jumps] - state.mu_y - state.rho_j * state.zv[jumps]
                     if likelihood else empty)
            state.sigma_y_sq = draw_sigma_y_sq(resid, priors, rng)
        elif step == "mu_v":
            state.mu_v = draw_mu_v(state.zv[jumps] if likelihood else empty,
                                   priors, rng)
        elif step == "mu":
            if likelihood:
                w = state.v[:-1]
                vol_resid = (state.v[1:] - state.alpha - state.beta * w
                             - state.j * state.zv)
                state.mu = draw_mu(y - state.j * state.zy, w, vol_resid,
                                   state.psi, state.omega, priors, rng)
            else:
                state.mu = draw_mu(empty, empty, empty, state.psi, state.omega,
                                   priors, rng)
        elif step == "vol_regression":
            if likelihood:
                w = state.v[:-1]
                r_y = y - state.mu - state.j * state.zy
                target = state.v[1:] - state.j * state.zv - state.psi * r_y
                state.alpha, state.beta = draw_alpha_beta(
                    target, w, state.omega, priors, rng)
            else:
                state.alpha, state.beta = draw_alpha_beta(
                    empty, empty, state.omega, priors, rng)
        elif step == "vol_shocks":
            if likelihood:
                w = state.v[:-1]
                root = np.sqrt(w)
                r_y = y - state.mu - state.j * state.zy
                r_v = (state.v[1:] - state.alpha - state.beta * w
                       - state.j * state.zv)
                state.psi, state.omega = draw_psi_omega(
                    r_y / root, r_v / root, priors, rng)
            else:
                state.psi, state.omega = draw_psi_omega(empty, empty, priors, rng)
        elif step == "volatility":
            _update_volatility(state, y, rng, cfg.v_floor,
                               vol_log_density or volatility_log_density)

    return state
