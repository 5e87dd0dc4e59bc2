# Centralised configuration for the krkit crystal toolkit


# Artifact schema version (bump when the graph JSON layout changes)
SCHEMA_VERSION = 1

# Maximum number of elements any single generation may produce
ELEMENT_BUDGET = 2_000_000

# Environment variable names that override the constants above
BUDGET_ENV_VAR = "KRKIT_BUDGET"
WORKERS_ENV_VAR = "KRKIT_WORKERS"
CACHE_ENV_VAR = "KRKIT_CACHE"  # "0" disables the build cache

# Matrix worker pool size
MATRIX_WORKERS = 4

# Build cache TTL in hours (artifacts are deterministic, so this is generous)
CACHE_TTL_HOURS = 24 * 30



# File names and paths
CACHE_DB_FILE = "krkit_cache.db"
DESK_MATRIX_FILE = "desk_matrix.txt"
MATRIX_REPORT_FILE = "matrix_report.json"

# Directory names
DATA_DIR = "data"
ASSETS_DIR = "assets"
REPORTS_DIR = "reports"



# Type strings accepted on the command line ("C1:3" etc.)
FAMILY_TAGS = ("A1", "B1", "C1", "D1", "A2e", "A2o", "D2")

# Smallest classical rank per family
MIN_RANK = {
    "A1": 2,
    "B1": 2,
    "C1": 2,
    "D1": 4,
    "A2e": 1,
    "A2o": 2,
    "D2": 2,
}

# Multipliers exercised by `check similarity` when --m is omitted
SIMILARITY_MULTIPLIERS = (2, 3)

# Every variation kind the toolkit knows how to build
VARIATION_KINDS = (
    "1-i", "1-ii", "1-iii", "1-iv", "1-v", "1-vi", "1-vii", "1-viii",
    "2-i", "2-ii", "2-iii",
)

# Checks a matrix entry runs when its line lists none
DEFAULT_CHECKS = ("decomp", "simple", "witness")

# Stable process exit codes
EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_RESOURCE = 2
EXIT_IO = 3
EXIT_USAGE = 4
