"""proxsplit: a proximal-splitting convex optimization toolkit.

Modules:

* ``core``     -- vectors, function/operator wrappers, schedules, diagnostics
* ``scalar``   -- 1-D root finding, Lambert W, golden-section prox oracle
* ``catalog``  -- scalar prox kinds and prox calculus combinators
* ``sets``     -- closed convex sets with exact projections
* ``solvers``  -- the splitting algorithms
* ``problems`` -- builders for the worked desk-scale examples
* ``cli``      -- the ``proxsplit`` command-line front end
"""

from . import catalog, cli, core, problems, scalar, sets, solvers
from .core import (
    LinearMap,
    ProxFn,
    Schedule,
    SmoothFn,
    SolveResult,
    identity_map,
    matrix_map,
    operator_norm,
    prox_of,
    subgradient_certificate,
)
from .solvers import StoppingRule

__all__ = [
    "catalog",
    "cli",
    "core",
    "problems",
    "scalar",
    "sets",
    "solvers",
    "LinearMap",
    "ProxFn",
    "Schedule",
    "SmoothFn",
    "SolveResult",
    "StoppingRule",
    "identity_map",
    "matrix_map",
    "operator_norm",
    "prox_of",
    "subgradient_certificate",
]

__version__ = "0.1.0"
