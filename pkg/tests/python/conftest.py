"""
pytest configuration and fixtures for aniso unit tests

Puts lib/Python on the import path and provides the grids and weight
parameters most tests start from.
"""

import os
import sys

import pytest

lib_path = os.path.join(os.path.dirname(__file__), "../..", "lib", "Python")
sys.path.insert(0, os.path.abspath(lib_path))
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from ops.grids import Grading, TimeDomain, WeightParams, make_graded_grid  # noqa: E402
from utils.cache import get_oracle_cache  # noqa: E402


@pytest.fixture(autouse=True)
def clear_oracle_cache():
    """Start every test with an empty oracle cache so hit counts are predictable."""
    get_oracle_cache().clear()
    yield
    get_oracle_cache().clear()


@pytest.fixture
def uniform_grid():
    """Uniform midpoint grid with 64 cells on (0, 1)."""
    return make_graded_grid(TimeDomain.finite(1.0), 64, Grading.uniform())


@pytest.fixture
def graded_grid():
    """Geometrically graded grid with 256 cells on (0, 1)."""
    return make_graded_grid(TimeDomain.finite(1.0), 256, Grading.geometric())


@pytest.fixture
def periodic_grid():
    """Uniform grid with 64 cells on the circle of length 2*pi."""
    import math

    return make_graded_grid(TimeDomain.periodic(2 * math.pi), 64, Grading.uniform())


@pytest.fixture
def unweighted():
    """p = 2 without a power weight."""
    return WeightParams(2.0, 1.0)


@pytest.fixture
def weighted():
    """p = 2 with mu = 3/4, i.e. the weight t^(1/2)."""
    return WeightParams(2.0, 0.75)


@pytest.fixture
def report_document():
    """A one-instance hardy report as stored in a verify artifact."""
    import copy

    from fixtures.report_documents import HARDY_REPORT

    return copy.deepcopy(HARDY_REPORT)
