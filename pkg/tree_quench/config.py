from pathlib import Path


# -------------------- Fixed points and critical values  ----------------
FIXED_POINT_TOLERANCE = 1e-13  # Stop when successive log-ratios differ by less than this
FIXED_POINT_MAX_ITERATIONS = 100_000  # Iteration cap; hitting it flags non-convergence
CRITICAL_FIELD_TOLERANCE = 1e-6  # Bisection tolerance on the critical field h_c
COEXISTENCE_GAP = 1e-8  # Magnetization gap above which plus and minus phases coexist

# -------------------- Exact enumeration  ----------------
MAX_BRUTE_FORCE_SPINS = 13  # Largest number of free vertices enumerated by the Gibbs oracle
MAX_GENERATOR_SPINS = 15  # Largest number of free vertices for exact generators
DENSE_EIGEN_LIMIT = 1024  # State-space size up to which dense eigensolvers are used
EIGEN_TOLERANCE = 1e-10  # Relative tolerance passed to the Lanczos solver
EIGEN_RESIDUAL_LIMIT = 1e-6  # Residual norm above which an eigenpair is rejected
LOG_SOBOLEV_RESTARTS = 8  # Default number of restarts of the entropy-ratio search
DEGENERATE_ENTROPY = 1e-12  # Relative entropy below which a trial function counts as constant

# -------------------- Simulation  ----------------
TRUNCATION_SAFETY_CONSTANT = 4  # Truncation depth per unit of time
MAX_SIMULATION_DEPTH = 16  # Deepest tree simulated; larger requests are capped with a warning
MAX_RECURSION_VERTICES = 2**24  # Largest tree handled by the vectorized recursions
DEBUG_ENV_VAR = "TREEQ_DEBUG"  # When set, legality is asserted after every hard-core event

# -------------------- Statistics  ----------------
FIT_MIN_R2 = 0.9  # Log-linear fits below this R^2 are flagged
FIT_MAX_RELATIVE_ERROR = 0.3  # Points with larger relative error are left out of fits
JACKKNIFE_BLOCKS = 20  # Number of leave-one-block-out resamples
CONFIDENCE_Z = 1.959963984540054  # Two-sided 95% normal quantile
SIGMA_SLACK = 3.0  # Standard errors allowed in statistical assertions

# -------------------- Parallelism and seeding  ----------------
WORKERS_ENV_VAR = "TREEQ_WORKERS"  # Default worker count when --workers is absent
DRIVER_STREAM = 0  # Event times and marks
DRIVER_BLOCK_SIZE = 1024  # Vertices sharing one driver stream per unit time window
INITIAL_STREAM = 1  # Initial configurations
ENVIRONMENT_STREAM = 2  # Obstacle environments
BOUNDARY_STREAM = 3  # Random fixed boundaries
EQUILIBRIUM_STREAM = 4  # Exact Gibbs samples used as starting points

# -------------------- Outputs  ----------------
DEFAULT_CHECKPOINT_COUNT = 21  # Checkpoint times between 0 and t_max when none are given
DEFAULT_OUTPUT_DIR = Path("treeq_out")  # Where subcommands write CSV files and manifests
CACHE_DIR = Path.home() / ".cache" / "tree_quench" / "precomputed"  # joblib cache location
