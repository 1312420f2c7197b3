"""Typical Poisson-Voronoi cells and the law of their far vertices.

Exact constants, geometric predicates, certified cell construction, Monte
Carlo estimators with reproducible parallel streams, and the box-maximum
extremal-index experiment. Hot kernels run compiled (Cython) with a
pure-numpy fallback selected at import; see ``pvextremes.kernel.BACKEND``.
"""

from . import constants, errors, estimators, extremes, geometry, sampling, typical_cell
from .kernel import BACKEND

__all__ = [
    "BACKEND",
    "constants",
    "errors",
    "estimators",
    "extremes",
    "geometry",
    "sampling",
    "typical_cell",
]

__version__ = "0.1.0"
