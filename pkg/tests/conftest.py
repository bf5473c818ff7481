"""Shared pytest fixtures and a hypothesis profile tuned for numerics.

Eigendecompositions and SVDs are fast at the orders tested here but LAPACK
warm-up can trip hypothesis' default per-example deadline, so the profile
disables it and keeps example counts moderate.
"""

import pytest
from click.testing import CliRunner
from hypothesis import HealthCheck, settings

settings.register_profile(
    "numeric",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numeric")


@pytest.fixture
def runner():
    return CliRunner()
