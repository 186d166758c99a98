"""
Global configuration and constants.
Census limits, homology arithmetic mode, file-format versions, logging.
"""

# ─── CENSUS ──────────────────────────────────────────────────────────────────
MAX_CENSUS_VERTICES  = 3         # larger n is refused before any graph is built
MAX_GLUINGS          = 2_000_000 # wing gluings visited by one census (n=3 needs 233_280)
ORBIT_CAP            = 250_000   # hard stop for enumerate_special
DEFAULT_JOBS         = 1         # single-threaded reference path
CHUNK_SIZE           = 512       # gluings handed to one worker task

# ─── HOMOLOGY ────────────────────────────────────────────────────────────────
SNF_MODE             = "exact"   # "exact" (python ints) or "checked" (int64 bound)
CHECKED_INT_BOUND    = 2 ** 62   # |entry| limit in checked mode

# ─── FILE FORMATS ────────────────────────────────────────────────────────────
CATALOG_FORMAT_VERSION  = 1
MODEL_FORMAT_VERSION    = 1
ENCODING_FORMAT_VERSION = 1

# ─── DATABASE ────────────────────────────────────────────────────────────────
DB_PATH              = "census.db"

# ─── LOGGING ─────────────────────────────────────────────────────────────────
LOG_LEVEL            = "INFO"
LOG_FILE             = None      # e.g. "census.log"; None disables the file handler
