"""Benchmark the compiled kernels against the pure-Python fallback.

Times the two hot loops on identical inputs: the row-projection iteration
(steps per second) and the one-sided Jacobi sweeps (seconds per decomposition).
"""

import time

import numpy as np

from . import _backend
from .linalg import JACOBI_TOL_FACTOR, frobenius_norm_sq, row_norms_sq
from .problems import gen_gaussian_row_normalized
from .rng import Rng
from .solver import record_steps


def _time_run(kernel, A, b, steps, seed):
    cum = np.cumsum(row_norms_sq(A))
    ks = record_steps(steps, max(1, steps // 10))
    start = time.perf_counter()
    kernel(A, b, cum, row_norms_sq(A), A.shape[0] - 1, np.zeros(A.shape[1]), Rng(seed).state, steps, ks)
    return time.perf_counter() - start


def _time_jacobi(kernel, A):
    work = np.ascontiguousarray(A.T)
    vt = np.eye(A.shape[1])
    tol = JACOBI_TOL_FACTOR * frobenius_norm_sq(A)
    start = time.perf_counter()
    sweeps, _ = kernel(work, vt, tol, 60)
    return time.perf_counter() - start, sweeps


def run_benchmark(n=300, steps=100000, svd_n=None, seed=1):
    """Print timing rows for every available backend."""
    svd_n = svd_n or min(n, 200)
    A = gen_gaussian_row_normalized(n, n, seed)
    b = np.ones(n)
    A_svd = gen_gaussian_row_normalized(svd_n, svd_n, seed + 1)

    backends = _backend.available_backends()
    print(f"active backend: {_backend.backend_name()}")
    print(f"iteration: n={n}, {steps} steps | svd: n={svd_n}")
    rows = []
    for name in backends:
        run_kernel, jacobi = _backend.get_kernels(name)
        run_s = _time_run(run_kernel, A, b, steps, seed)
        svd_s, sweeps = _time_jacobi(jacobi, A_svd)
        rows.append((name, run_s, steps / run_s, svd_s, sweeps))
    base = rows[-1][1]
    base_svd = rows[-1][3]
    print(f"{'backend':<10} {'run [s]':>10} {'steps/s':>12} {'svd [s]':>10} {'sweeps':>7} {'speedup':>8}")
    for name, run_s, rate, svd_s, sweeps in rows:
        speed = base / run_s
        print(f"{name:<10} {run_s:>10.4f} {rate:>12.0f} {svd_s:>10.4f} {sweeps:>7d} {speed:>7.1f}x")
    return rows
