EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INVALID_INPUT = 2

DEFAULT_SEED = 0
DEFAULT_BOX = 100.0
DEFAULT_K = 1
DEFAULT_T = "1"

DEFAULT_TRIALS = 200
DEFAULT_N_MAX = 10
DEFAULT_T_MAX = 3
DEFAULT_K_MAX = 3
DEFAULT_BALANCED_K_MAX = 2
DEFAULT_BALANCED_SHARE = 0.5
DEFAULT_WORKERS = 1
BALANCED_GROUP_COUNTS = (2, 3)

BENCH_HEADER = [
    "instance_id",
    "n",
    "ell",
    "t",
    "k",
    "alg_cost",
    "opt_cost",
    "ratio",
    "fair",
    "dcs_weight",
    "lemma5",
    "lemma6",
    "switch_bound",
    "runtime_ms",
]
SUMMARY_SUFFIX = ".summary.json"
