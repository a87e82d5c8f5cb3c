"""Equivalence of the compiled and pure-Python kernels on identical inputs."""

import os

import numpy as np
import pytest

from kaczmarz import _backend
from kaczmarz.linalg import JACOBI_TOL_FACTOR, frobenius_norm_sq, row_norms_sq
from kaczmarz.problems import gen_gaussian_row_normalized
from kaczmarz.rng import Rng
from kaczmarz.solver import record_steps

needs_compiled = pytest.mark.skipif(
    "compiled" not in _backend.available_backends(),
    reason="compiled extension not built",
)


@needs_compiled
def test_row_sequences_and_state_identical():
    A = gen_gaussian_row_normalized(30, 30, seed=3)
    b = np.ones(30)
    nsq = row_norms_sq(A)
    cum = np.cumsum(nsq)
    ks = record_steps(1500, 1)
    args = (A, b, cum, nsq, 29, np.zeros(30), Rng(11).state, 1500, ks)
    it_c, ch_c, st_c = _backend.get_kernels("compiled")[0](*args)
    it_p, ch_p, st_p = _backend.get_kernels("python")[0](*args)
    assert np.array_equal(ch_c, ch_p)
    assert st_c == st_p
    assert np.max(np.abs(it_c - it_p)) <= 1e-11 * max(1.0, np.max(np.abs(it_p)))


@needs_compiled
def test_jacobi_agreement():
    A = gen_gaussian_row_normalized(25, 25, seed=8)
    tol = JACOBI_TOL_FACTOR * frobenius_norm_sq(A)
    results = []
    for name in ("compiled", "python"):
        work = A.T.copy()
        vt = np.eye(25)
        _backend.get_kernels(name)[1](work, vt, tol, 60)
        sig = np.sort(np.sqrt(np.einsum("ij,ij->i", work, work)))
        results.append((sig, work, vt))
    sig_c, _, _ = results[0]
    sig_p, _, _ = results[1]
    assert np.max(np.abs(sig_c - sig_p)) <= 1e-12 * sig_p[-1]


@needs_compiled
def test_zero_weight_rows_skipped_by_both():
    A = np.array([[0.0, 0.0], [1.0, 0.5], [0.0, 0.0], [0.3, 2.0]])
    b = np.zeros(4)
    nsq = row_norms_sq(A)
    cum = np.cumsum(nsq)
    ks = record_steps(500, 1)
    args = (A, b, cum, nsq, 3, np.ones(2), Rng(5).state, 500, ks)
    for name in ("compiled", "python"):
        _, chosen, _ = _backend.get_kernels(name)[0](*args)
        seen = set(int(c) for c in chosen if c >= 0)
        assert seen <= {1, 3}


@needs_compiled
def test_active_backend_prefers_compiled():
    if os.environ.get("KACZMARZ_BACKEND", "auto") != "auto":
        pytest.skip("backend forced by environment")
    assert _backend.backend_name() == "compiled"


def test_python_kernels_importable():
    run_kernel, jacobi = _backend.get_kernels("python")
    assert callable(run_kernel) and callable(jacobi)
