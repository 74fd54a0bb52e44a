"""
Pytest configuration and fixtures for the HLZeta test suite.
"""

import pytest
import sys
from pathlib import Path

# Add project root to Python path for imports
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from hlzeta.models.schemas import IdentityReport  # noqa: E402
from hlzeta.services.specfun import Sieve  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running identity checks")


@pytest.fixture
def small_sieve():
    """A private sieve, so tests never resize the shared one."""
    return Sieve(bound=1000)


@pytest.fixture
def make_report():
    """Build an IdentityReport by hand for suite and store tests."""

    def _make(identity_id="fake.check", lhs=1.0, rhs=1.0, tolerance=1e-10, anchor="test"):
        return IdentityReport.build(identity_id, lhs, rhs, tolerance, anchor)

    return _make


@pytest.fixture
def client():
    """FastAPI test client over a fresh application."""
    from fastapi.testclient import TestClient

    from hlzeta.main import create_app

    with TestClient(create_app()) as test_client:
        yield test_client
