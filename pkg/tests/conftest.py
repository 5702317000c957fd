# tests/conftest.py
import numpy as np
import pytest

from ghlab.config import get_settings
from ghlab.services.optimizer import SearchBudget

GHLAB_VARS = [
    "GHLAB_SEED",
    "GHLAB_STARTS",
    "GHLAB_ITERATIONS",
    "GHLAB_NODE_BUDGET",
    "GHLAB_N_JOBS",
    "GHLAB_LOG_LEVEL",
]


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Every test starts from default settings, whatever the developer's .env says."""
    for name in GHLAB_VARS:
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def seeded_rng():
    """Provides a deterministic, seeded random number generator."""
    return np.random.default_rng(seed=42)


@pytest.fixture
def small_budget():
    return SearchBudget(starts=6, iterations=150)


@pytest.fixture
def search_budget():
    """Budget for searches whose optimum is not one of the structured starts."""
    return SearchBudget(starts=24, iterations=400)


def random_metric(rng: np.random.Generator, n: int) -> np.ndarray:
    """Shortest-path closure of random positive weights: always a metric"""
    W = rng.uniform(0.5, 3.0, size=(n, n))
    D = np.triu(W, 1)
    D = D + D.T
    for k in range(n):
        D = np.minimum(D, D[:, k:k + 1] + D[k:k + 1, :])
    np.fill_diagonal(D, 0.0)
    return D
