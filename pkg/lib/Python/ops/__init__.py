"""
aniso Operations Package - grids, norms, operators, interpolation, oracle and verification suites
"""

from . import ensembles, grids, interpolation, norms, operators, oracle, report, spectral, suites, verify

__all__ = [
    "ensembles",
    "grids",
    "interpolation",
    "norms",
    "operators",
    "oracle",
    "report",
    "spectral",
    "suites",
    "verify",
]
