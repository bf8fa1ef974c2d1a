"""Shared fixtures: grids and solvers are session-scoped because building a
solver's preconditioner is the expensive part of most tests."""

import numpy as np
import pytest
from hypothesis import settings

from jetwave.elliptic import DtnSolver
from jetwave.spectral import TorusField, TorusGrid, band_limited_random

settings.register_profile("suite", max_examples=15, deadline=None,
                          derandomize=True)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def grid32():
    return TorusGrid(32, 32)


@pytest.fixture(scope="session")
def grid16():
    return TorusGrid(16, 16)


@pytest.fixture(scope="session")
def solver32(grid32):
    return DtnSolver(grid32, 48)


@pytest.fixture(scope="session")
def solver16(grid16):
    return DtnSolver(grid16, 32)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)


def smooth_surface(grid, rng, R=1.0, amp=0.05, kmax=3, decay=3.0):
    return TorusField.constant(grid, R) + band_limited_random(
        grid, rng, kmax=kmax, decay=decay, max_norm=amp * R)
