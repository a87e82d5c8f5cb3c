import numpy as np
import pytest

from kaczmarz import gen_gaussian_row_normalized, gen_symmetric_gaussian, new_rng
from kaczmarz.solver import ProblemInstance


@pytest.fixture(scope="session")
def rng_np():
    return np.random.default_rng(20240811)


@pytest.fixture(scope="session")
def small_instance():
    """20x20 row-normalized instance with a known solution."""
    A = gen_gaussian_row_normalized(20, 20, seed=101)
    x_true = new_rng(5).normals(20)
    return ProblemInstance(A=A, b=A @ x_true, x0=np.zeros(20), x_true=x_true)


@pytest.fixture(scope="session")
def symmetric_instance():
    """15x15 symmetric instance with a known solution."""
    A = gen_symmetric_gaussian(15, seed=303)
    x_true = new_rng(7).normals(15)
    return ProblemInstance(A=A, b=A @ x_true, x0=np.zeros(15), x_true=x_true)
