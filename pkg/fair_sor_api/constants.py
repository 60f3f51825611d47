SOLVER_EXACT = "exact"
SOLVER_PRIMAL_DUAL = "primal-dual"
SOLVERS = (SOLVER_EXACT, SOLVER_PRIMAL_DUAL)

EXACT_ALPHA = 1.0
PRIMAL_DUAL_ALPHA = 3.504
DEFAULT_EPSILON = 0.1

MODE_EUCLIDEAN = "euclidean-plane"
MODE_RANDOM_METRIC = "random-metric"
GENERATION_MODES = (MODE_EUCLIDEAN, MODE_RANDOM_METRIC)

ROUND_DIGITS = 9
RELATIVE_TOLERANCE = 1e-9
# additive slack for triangle checks on matrices rounded to ROUND_DIGITS
METRIC_TOLERANCE = 2e-9

MAX_EXACT_ELEMENTS = 12
MAX_ORACLE_POINTS = 12
MAX_BRUTEFORCE_EDGES = 20

EXPANSION_FACTOR = 3.0
MERGE_FACTOR = 2.0
SUPERCLUSTER_FACTOR_TWO_COLOR = 8.0
SUPERCLUSTER_FACTOR_BALANCED = 10.0
SWITCH_FACTOR = 6.0
SWITCHLESS_FACTOR = 4.0
COLOR_PATH_FACTOR = 8.0

MODE_TWO_COLOR = "two-color"
MODE_BALANCED = "balanced"
