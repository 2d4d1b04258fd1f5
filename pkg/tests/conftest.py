import numpy as np
import pytest

from prodnorm._config import audit_grid


@pytest.fixture(scope="session")
def grids():
    return audit_grid()


@pytest.fixture(scope="session")
def norm_grid(grids):
    g = grids["normalization_grid"]
    return [(n, rho) for n in g["n"] for rho in g["rho"]]


def rel_err(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300))
