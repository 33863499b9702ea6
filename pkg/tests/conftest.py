"""
Pytest configuration and fixtures for the test suite.

Provides shared materials, backgrounds, grids and basic states. Grids are
kept small so the solver-based tests finish in seconds.
"""

import numpy as np
import pytest

from app.models.grid import Grid
from app.models.material import MaterialParams
from app.services.interface.background import build_background
from app.services.linearized.basic_state import build_basic_state


@pytest.fixture
def rng():
    """Seeded generator so every test draws the same samples."""
    return np.random.default_rng(12345)


@pytest.fixture(params=[2, 3], ids=["d2", "d3"])
def params(request):
    """Gamma-law material with unit elastic coefficients in 2D and 3D."""
    return MaterialParams(dim=request.param, gamma=1.4)


@pytest.fixture
def params_2d():
    return MaterialParams(dim=2, gamma=1.4)


@pytest.fixture
def params_3d():
    return MaterialParams(dim=3, gamma=1.4)


@pytest.fixture
def background_2d(params_2d):
    """F+ = I, F11- = 0.5, S+ = 0 (the stable example with margin 0.5)."""
    return build_background([1.0, 1.0], 0.5, 0.0, params_2d)


@pytest.fixture
def small_grid():
    return Grid(dim=2, n1=16, n_tan=8)


@pytest.fixture
def flat_basic(background_2d, small_grid):
    """Basic state equal to the background on the small grid."""
    return build_basic_state(background_2d, small_grid)


@pytest.fixture
def perturbed_basic(params_2d, small_grid):
    """Basic state with a curved front and smooth velocity and pressure bumps."""
    bg = build_background([1.0, 1.0], 0.8, 0.0, params_2d)
    return build_basic_state(bg, small_grid, front_amplitude=0.1, velocity_amplitude=0.05,
                             pressure_amplitude=0.05, norm_order=1)
