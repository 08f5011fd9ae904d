"""Configuration for the hash family bound calculator and constructor.

All values are loaded from environment variables. None of them is a secret,
so each has a documented default. Override via shell environment or a .env
file in the working directory; shell values win over .env values.
"""

import os

# .env must be loaded before the reads below
try:
    from dotenv import find_dotenv, load_dotenv
except ImportError:
    pass
else:
    load_dotenv(find_dotenv(usecwd=True))

# Seed used by `construct` when --seed is omitted
DEFAULT_SEED = int(os.getenv("HASHBOUNDS_DEFAULT_SEED", "20160401"))

# Moser-Tardos resample cap = RESAMPLE_CAP_FACTOR * C(n, w)
RESAMPLE_CAP_FACTOR = int(os.getenv("RESAMPLE_CAP_FACTOR", "100"))

# Refuse to scan bad-event families larger than this (construct and verify)
MAX_SCAN_EVENTS = int(os.getenv("MAX_SCAN_EVENTS", "2000000"))

# Concurrent table rows / concurrent construction runs
TABLE_WORKERS = int(os.getenv("TABLE_WORKERS", "4"))

# Brute-force oracle guards
ORACLE_MAX_SUBSETS = int(os.getenv("ORACLE_MAX_SUBSETS", "10000"))
ORACLE_MAX_COLORINGS = int(os.getenv("ORACLE_MAX_COLORINGS", "10000000"))

# Root finding
BISECTION_MAX_ITER = int(os.getenv("BISECTION_MAX_ITER", "400"))
BISECTION_TOLERANCE = float(os.getenv("BISECTION_TOLERANCE", "1e-13"))  # on ln(mu)

LOG_LEVEL = os.getenv("LOG_LEVEL", "WARNING")
