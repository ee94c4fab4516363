import logging
import os
import sys

# Tolerancias por defecto (datos del problema escalados a O(1))
FEASIBILITY_TOL = 1e-9
PIVOT_TOL = 1e-11
CERTIFICATE_TOL = 1e-8
WEIGHT_PRUNE_TOL = 1e-12
AUDIT_TOL = 1e-7
VERTEX_DEDUP_TOL = 1e-9

# Guardas del oráculo de referencia y de la enumeración de vértices
ORACLE_MAX_DIM = 8
ORACLE_MAX_ROWS = 16

# Valores por defecto de Frank-Wolfe
DEFAULT_MAX_ITER = 1000
DEFAULT_GAP_TOL = 1e-6

LOG_LEVEL = os.environ.get("FWSENS_LOG_LEVEL", "WARNING").upper()
LOG_FORMAT = "%(levelname)s [%(name)s]: %(message)s"


def configure_logging(level: str = LOG_LEVEL) -> None:
    """Installs a single stderr handler on the package logger.

    stdout is reserved for the JSON reports, so every diagnostic goes to stderr.
    """
    package_logger = logging.getLogger("modules")
    package_logger.setLevel(level.upper() if isinstance(level, str) else level)
    for handler in list(package_logger.handlers):
        package_logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    package_logger.addHandler(handler)
    package_logger.propagate = False
