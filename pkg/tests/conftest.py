import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from regdae.pencil import Pencil, generate_regular

settings.register_profile(
    "default", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def example():
    """M0 = diag(1, 0), M1 = [[3, 1], [2, 1]]: sigma = {-1}, B = 1, C = 2."""
    return Pencil(np.diag([1.0, 0.0]), np.array([[3.0, 1.0], [2.0, 1.0]]))


@pytest.fixture
def scalar():
    return Pencil(np.array([[1.0]]), np.array([[1.0]]))


@pytest.fixture
def saddle():
    return Pencil(np.eye(2), np.diag([1.0, -1.0]))


@st.composite
def regular_pencils(draw, max_n=6, min_rank=0):
    n = draw(st.integers(1, max_n))
    rank = draw(st.integers(min(min_rank, n), n))
    seed = draw(st.integers(0, 2**31 - 1))
    kind = draw(st.sampled_from(["accretive", "general"]))
    return generate_regular(n, rank, seed, kind=kind)
