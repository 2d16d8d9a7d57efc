"""Test configuration and fixtures."""

import numpy as np
import pytest

from mubqkd_mcp.galois_field import make_field
from mubqkd_mcp.mub_builder import build_mub


def pytest_configure(config):
    """Configure pytest."""
    config.addinivalue_line("markers", "asyncio: mark test as async")


@pytest.fixture(scope="session")
def gf3():
    return make_field(3, 1)


@pytest.fixture(scope="session")
def gf9():
    return make_field(3, 2)


@pytest.fixture(scope="session")
def mub3(gf3):
    return build_mub(gf3)


@pytest.fixture(scope="session")
def mub9(gf9):
    return build_mub(gf9)


@pytest.fixture
def rng():
    """Fixed generator for measurement tests."""
    return np.random.default_rng(1234)
