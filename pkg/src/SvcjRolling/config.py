"""
Run configuration.

A config file is a flat JSON object; nested settings use dotted keys such
as `mcmc.n_iter`, `priors.lambda_a` or `params.sigma_v`. Values are merged
as: CLI flag > config file > SVCJ_SEED (seed only) > default.
"""

import json
import logging
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Mapping, Optional

from .errors import ConfigError, ValidationError
from .mcmc import McmcConfig, Priors
from .model import SvcjParams
from .settings import (CLUSTER_DIMS, DEFAULT_SEED, ELBOW_K_MAX, ENV_SEED,
                       KMEANS_RESTARTS, MA_WIDTH, MIN_WINDOW, OUTPUT_DIR,
                       PARAM_NAMES, RETURN_SCALE, ROLLING_STEP,
                       SIMULATION_HORIZON, SIMULATION_PARAMS, SIMULATION_S0,
                       SIMULATION_START_DATE, WINDOW_PRESETS)

logger = logging.getLogger(__name__)


def _integer(key, value):
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        if isinstance(value, str):
            try:
                return int(value.strip())
            except ValueError:
                pass
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return value


def _real(key, value):
    if isinstance(value, bool):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a number, got {value!r}")


def _text(key, value):
    if not isinstance(value, (str, Path)):
        raise ConfigError(f"{key} must be a string, got {value!r}")
    return str(value)


def _flag(key, value):
    if not isinstance(value, bool):
        raise ConfigError(f"{key} must be true or false, got {value!r}")
    return value


def _integers(key, value):
    if isinstance(value, (int, str)) and not isinstance(value, bool):
        value = [value]
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"{key} must be a non-empty list of integers")
    return tuple(_integer(key, item) for item in value)


def _names(key, value):
    if isinstance(value, str):
        value = [part.strip() for part in value.split(",")]
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{key} must name two parameters, got {value!r}")
    return tuple(_text(key, item) for item in value)


def _reals(key, value):
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{key} must be a list of numbers")
    return tuple(_real(key, item) for item in value)


TOP_LEVEL_KEYS = {
    "input_path": _text,
    "output_dir": _text,
    "prices_path": _text,
    "latent_out": _text,
    "window": _integer,
    "windows": _integers,
    "step": _integer,
    "ma_width": _integer,
    "scale": _real,
    "seed": _integer,
    "parallelism": _integer,
    "k": _integer,
    "k_max": _integer,
    "restarts": _integer,
    "dims": _names,
    "horizon": _integer,
    "start_date": _text,
    "s0": _real,
    "v0": _real,
    "quiet": _flag,
    "test_mode": _flag,
}

MCMC_KEYS = {
    "n_iter": _integer,
    "burn_in": _integer,
    "thin": _integer,
    "v_proposal_sd": _real,
    "v_floor": _real,
    "tune_interval": _integer,
    "target_acceptance": _reals,
}

PRIOR_KEYS = {f.name: _real for f in fields(Priors)}
PARAM_KEYS = {name: _real for name in PARAM_NAMES}


@dataclass(frozen=True)
class RunConfig:
    input_path: Optional[str] = None
    output_dir: str = OUTPUT_DIR
    prices_path: Optional[str] = None
    latent_out: Optional[str] = None
    # single estimation window; None uses every return
    window: Optional[int] = None
    windows: tuple = WINDOW_PRESETS
    step: int = ROLLING_STEP
    ma_width: int = MA_WIDTH
    scale: float = RETURN_SCALE
    seed: int = DEFAULT_SEED
    parallelism: int = 1
    k: Optional[int] = None
    k_max: int = ELBOW_K_MAX
    restarts: int = KMEANS_RESTARTS
    dims: tuple = CLUSTER_DIMS
    horizon: int = SIMULATION_HORIZON
    start_date: str = SIMULATION_START_DATE
    s0: float = SIMULATION_S0
    v0: Optional[float] = None
    quiet: bool = False
    test_mode: bool = False
    mcmc: McmcConfig = field(default_factory=McmcConfig)
    priors: Priors = field(default_factory=Priors)
    params: SvcjParams = field(
        default_factory=lambda: SvcjParams.from_mapping(SIMULATION_PARAMS))

    def __post_init__(self):
        problems = []
        for window in self.windows + ((self.window,) if self.window else ()):
            if window < MIN_WINDOW:
                problems.append(f"windows: {window} is below the minimum {MIN_WINDOW}")
        for name in ("step", "ma_width", "parallelism", "restarts", "horizon"):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be >= 1")
        if self.k is not None and self.k < 1:
            problems.append("k must be >= 1")
        if self.k_max < 3:
            problems.append("k_max must be >= 3")
        if not self.scale > 0:
            problems.append("scale must be > 0")
        if not self.s0 > 0:
            problems.append("s0 must be > 0")
        if self.v0 is not None and not self.v0 >= 0:
            problems.append("v0 must be >= 0")
        if problems:
            raise ConfigError("; ".join(problems))


def load_config_file(path) -> dict:
    """
    Read a JSON config file into a flat dict of dotted keys.

    Nested objects are flattened (`{"mcmc": {"n_iter": 10}}` reads as
    `mcmc.n_iter`).

    Raises:
        ConfigError: Invalid JSON or not an object.
        OSError: The file cannot be read.
    """
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON: {e.msg} at line {e.lineno}")
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object")

    flat = {}
    for key, value in data.items():
        if isinstance(value, dict):
            for inner, inner_value in value.items():
                flat[f"{key}.{inner}"] = inner_value
        else:
            flat[key] = value
    logger.info("Loaded %d config keys from %s", len(flat), path)
    return flat


def _split(values: Mapping) -> tuple:
    top, mcmc, priors, params = {}, {}, {}, {}
    sections = {"mcmc": (mcmc, MCMC_KEYS), "priors": (priors, PRIOR_KEYS),
                "params": (params, PARAM_KEYS)}
    for key, value in values.items():
        section, _, name = key.partition(".")
        if name and section in sections:
            target, known = sections[section]
            if name not in known:
                raise ConfigError(f"unknown config key {key!r}")
            target[name] = known[name](key, value)
        elif key in TOP_LEVEL_KEYS:
            if value is not None:
                top[key] = TOP_LEVEL_KEYS[key](key, value)
        else:
            raise ConfigError(f"unknown config key {key!r}")
    return top, mcmc, priors, params


def build_run_config(overrides: Optional[Mapping] = None,
                     file_values: Optional[Mapping] = None,
                     environ: Optional[Mapping] = None) -> RunConfig:
    """
    Merge CLI overrides, config file values and the environment.

    Args:
        overrides: Dotted keys from the command line.
        file_values: Dotted keys from load_config_file.
        environ: Environment mapping (os.environ when None).

    Raises:
        ConfigError: Unknown key, wrong type or invalid value.
    """
    environ = os.environ if environ is None else environ
    merged = {}
    if environ.get(ENV_SEED, "").strip():
        merged["seed"] = _integer(ENV_SEED, environ[ENV_SEED])
    merged.update(file_values or {})
    merged.update(overrides or {})

    top, mcmc, priors, params = _split(merged)
    try:
        mcmc_cfg = McmcConfig(**mcmc)
        prior_cfg = Priors(**priors)
        sim_params = SvcjParams.from_mapping({**SIMULATION_PARAMS, **params})
    except ValidationError as e:
        raise ConfigError(str(e))
    return RunConfig(**top, mcmc=mcmc_cfg, priors=prior_cfg, params=sim_params)


def to_flat(cfg: RunConfig) -> dict:
    """The configuration as dotted keys with JSON-compatible values."""
    flat = {}
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if f.name in ("mcmc", "priors"):
            for key, inner in asdict(value).items():
                flat[f"{f.name}.{key}"] = list(inner) if isinstance(inner, tuple) else inner
        elif f.name == "params":
            for key, inner in value.as_dict().items():
                flat[f"params.{key}"] = inner
        else:
            flat[f.name] = list(value) if isinstance(value, tuple) else value
    return flat


def write_run_config(cfg: RunConfig, path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(to_flat(cfg), f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info("Wrote effective configuration to %s", path)
    return path
