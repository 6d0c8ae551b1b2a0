"""Constants for distillkit.

This module contains all constants organized by functionality:
- Numerical tolerances for the spectral backbone
- Kernel catalog identifiers and domain tolerances
- Multiplier root finding defaults
- Distillation engine limits
- Analysis thresholds
- Dataset presets and generators
- CLI defaults, file names, CSV layouts and exit codes
"""

# =============================================================================
# SPECTRAL BACKBONE
# =============================================================================
# Cyclic Jacobi stops once the off-diagonal Frobenius norm drops below
# JACOBI_OFF_DIAGONAL_TOL * ||G||_F
JACOBI_OFF_DIAGONAL_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100
# Accepted (with a warning) when the sweep cap is hit
JACOBI_FALLBACK_TOL = 1e-10

# Eigenvalues <= this fraction of max(|eigvals|) mean the Gram matrix is not PD
POSITIVITY_RELATIVE_TOL = 1e-12
# First eigenvector component above this magnitude is made positive
SIGN_SIGNIFICANCE_TOL = 1e-12

# =============================================================================
# KERNELS AND DATASETS
# =============================================================================
KERNEL_CUBIC_SPLINE_GREEN = "cubic_spline_green"
KERNEL_GAUSSIAN = "gaussian"
KERNEL_VARIANTS = (KERNEL_CUBIC_SPLINE_GREEN, KERNEL_GAUSSIAN)

SPLINE_DOMAIN = (0.0, 1.0)
# Spline inputs this close to 0 or 1 are pinned to f = 0
ANCHOR_TOL = 1e-12
DUPLICATE_POINT_TOL = 1e-12

# =============================================================================
# REGRESSION
# =============================================================================
DEFAULT_C_TOLERANCE = 1e-12
DEFAULT_MAX_BISECTION_ITERS = 200
ROOT_ABS_TOL = 1e-14
# Floor of the certification tolerance max(CERTIFICATION_ABS_TOL, c_tol * eps)
CERTIFICATION_ABS_TOL = 1e-10
# Outward doublings allowed when roundoff breaks the multiplier bracket
MAX_BRACKET_EXPANSIONS = 64
# Shift used by the near-interpolating fit, relative to d_max
INTERPOLATION_RELATIVE_RIDGE = 1e-10

# =============================================================================
# DISTILLATION
# =============================================================================
DEFAULT_MAX_ROUNDS = 50
# Ties ||y||^2 == K eps count as collapsed
COLLAPSE_SLACK = 1e-14

# =============================================================================
# ANALYSIS
# =============================================================================
DEGENERATE_EIGVAL_TOL = 1e-14
EFFECTIVE_BASIS_REL_THRESHOLD = 1e-3
# Relative slack granted to bound-vs-observation comparisons
BOUND_CHECK_RTOL = 1e-9
BOUND_CHECK_ATOL = 1e-12
B_DIAG_CONSISTENCY_RTOL = 1e-12
# Equivalent-kernel predictions vs the trace, relative to max(1, max|y0|)
EQUIVALENT_KERNEL_TOL = 1e-8

QUANTITY_CONSTRAINT = "constraint"
QUANTITY_MULTIPLIER_LOWER = "multiplier_lower"
QUANTITY_MULTIPLIER_UPPER = "multiplier_upper"
QUANTITY_MULTIPLIER_FLOOR = "multiplier_floor"
QUANTITY_Z_NORM = "z_norm"
QUANTITY_Z_DECREASING = "z_norm_decreasing"
QUANTITY_GUARANTEED_ROUNDS = "guaranteed_rounds"
QUANTITY_B_RATIO = "b_ratio"
QUANTITY_B_CONSISTENCY = "b_diag_consistency"
QUANTITY_TRACE_PROXY = "trace_proxy"
QUANTITY_EQUIVALENT_KERNEL = "equivalent_kernel"

# =============================================================================
# PRESETS AND GENERATORS
# =============================================================================
PRESET_RECORDED_SINE = "paper_sine"
PRESETS = (PRESET_RECORDED_SINE,)
RECORDED_SINE_EPSILON = 0.045
RECORDED_SINE_X = tuple(i / 10 for i in range(11))
RECORDED_SINE_Y = (
    0.38476636465198066,
    1.2333967683416893,
    1.33232242218057,
    0.6920159488889518,
    -0.29756145531871736,
    -0.24189291901377769,
    -0.7964485769175675,
    -0.9616480167034174,
    -0.49672509509916934,
    -0.3469066003991437,
    0.5589512650600734,
)

GENERATOR_SINE = "sine"
GENERATOR_FUNCTIONS = (GENERATOR_SINE,)

# =============================================================================
# CLI
# =============================================================================
ENV_OUT_DIR = "DISTILLKIT_OUT_DIR"
DEFAULT_CURVE_SAMPLES = 200
DEFAULT_SURFACE_SAMPLES = 51

DEFAULT_TRACE_CSV = "trace.csv"
DEFAULT_TRACE_JSON = "trace.json"
DEFAULT_REPORT_JSON = "report.json"
DEFAULT_CURVE_CSV = "curve.csv"
DEFAULT_BOUNDS_CSV = "bounds.csv"
DEFAULT_FIT_JSON = "fit.json"
DEFAULT_SURFACE_CSV = "green_surface.csv"

TRACE_CSV_COLUMNS = (
    "t",
    "c_t",
    "norm_z",
    "train_err_eps",
    "train_err_y0",
    "collapsed",
)
BOUNDS_CSV_COLUMNS = ("quantity", "t", "bound", "observed", "satisfied")

TRACE_FORMAT = "distillkit.trace"
TRACE_FORMAT_VERSION = 1

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_COLLAPSE = 2
EXIT_BOUND_VIOLATION = 3
