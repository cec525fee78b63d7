# Defaults

# Parameter family, in the column order of every parameter file
PARAM_NAMES = (
    "mu", "mu_y", "sigma_y", "lambda", "alpha",
    "beta", "rho", "sigma_v", "rho_j", "mu_v",
)

# Returns are log returns times this factor (percent)
RETURN_SCALE = 100.0

# Rolling windows
WINDOW_PRESETS = (150, 300, 600)
MIN_WINDOW = 30
ROLLING_STEP = 1
MA_WIDTH = 20

# MCMC
N_ITER = 5000
BURN_IN = 2500
THIN = 1
V_PROPOSAL_SD = 0.25
V_FLOOR = 1e-6
TUNE_INTERVAL = 100
TARGET_ACCEPTANCE = (0.3, 0.5)
QUANTILE_LEVELS = (0.05, 0.5, 0.95)
INIT_VARIANCE_SPAN = 20

# Priors
PRIOR_MU = (0.0, 25.0)              # normal (mean, var)
PRIOR_MU_Y = (0.0, 100.0)           # normal (mean, var)
PRIOR_SIGMA_Y_SQ = (5.0, 20.0)      # inverse-gamma (shape, scale)
PRIOR_LAMBDA = (2.0, 40.0)          # beta (a, b)
PRIOR_ALPHA = (0.0, 1.0)            # normal (mean, var)
PRIOR_BETA = (0.0, 1.0)             # normal (mean, var)
PRIOR_ALPHA_BETA_COV = 0.0
PRIOR_MU_V = (10.0, 20.0)           # inverse-gamma (shape, scale)
PRIOR_RHO_J = (0.0, 4.0)            # normal (mean, var)
PRIOR_PSI = (0.0, 0.5)              # psi | omega ~ normal(mean, ratio * omega)
PRIOR_OMEGA = (2.5, 0.1)            # inverse-gamma (shape, scale)

# Clustering
KMEANS_RESTARTS = 50
KMEANS_MAX_ITER = 300
ELBOW_K_MAX = 8

# Simulation
SIMULATION_HORIZON = 3000
SIMULATION_START_DATE = "2015-01-01"
SIMULATION_S0 = 100.0

# Environment
ENV_SEED = "SVCJ_SEED"
ENV_LOG_LEVEL = "SVCJ_LOG_LEVEL"
DEFAULT_SEED = 0

# Parameters simulated when none are configured
SIMULATION_PARAMS = {
    "mu": 0.1, "mu_y": -0.5, "sigma_y": 2.0, "lambda": 0.05, "alpha": 0.1,
    "beta": 0.6, "rho": -0.3, "sigma_v": 0.3, "rho_j": -0.5, "mu_v": 1.0,
}

# CLI
OUTPUT_DIR = "output"
RUN_CONFIG_FILE = "run_config.json"
CLUSTER_DIMS = ("mu", "beta")
