# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: row-projection iteration and one-sided Jacobi sweeps.

Semantics match kaczmarz._pykernels exactly; see that module for the
contract.  The splitmix64 stream uses native uint64 arithmetic, so draws and
selected row indices are bit-identical to the Python generator.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()

cdef unsigned long long GOLDEN = 0x9E3779B97F4A7C15u
cdef unsigned long long MIX1 = 0xBF58476D1CE4E5B9u
cdef unsigned long long MIX2 = 0x94D049BB133111EBu
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline unsigned long long _mix(unsigned long long z) nogil:
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef inline Py_ssize_t _search_right(const double* cum, Py_ssize_t m, double target) nogil:
    # First index whose cumulative weight strictly exceeds target.
    cdef Py_ssize_t lo = 0, hi = m, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if cum[mid] <= target:
            lo = mid + 1
        else:
            hi = mid
    return lo


def run_kernel(
    double[:, ::1] A,
    double[::1] b,
    double[::1] cum,
    double[::1] row_nsq,
    Py_ssize_t last_pos,
    double[::1] x0,
    object state_obj,
    Py_ssize_t steps,
    long long[::1] record_ks,
):
    cdef Py_ssize_t m = A.shape[0]
    cdef Py_ssize_t n = A.shape[1]
    cdef Py_ssize_t n_rec = record_ks.shape[0]
    cdef unsigned long long state = <unsigned long long> state_obj

    iterates_arr = np.empty((n_rec, n), dtype=np.float64)
    chosen_arr = np.full(n_rec, -1, dtype=np.int64)
    cdef double[:, ::1] iterates = iterates_arr
    cdef long long[::1] chosen = chosen_arr

    x_arr = np.array(x0, dtype=np.float64, copy=True)
    cdef double[::1] x = x_arr

    cdef Py_ssize_t ptr = 0, k, i, j
    cdef double u, target, dot, coeff, total = cum[m - 1]

    if n_rec > 0 and record_ks[0] == 0:
        for j in range(n):
            iterates[0, j] = x[j]
        ptr = 1

    with nogil:
        for k in range(1, steps + 1):
            state = state + GOLDEN
            u = <double> (_mix(state) >> 11) * INV_2_53
            target = u * total
            i = _search_right(&cum[0], m, target)
            if i >= m:
                i = last_pos
            dot = 0.0
            for j in range(n):
                dot += A[i, j] * x[j]
            coeff = (b[i] - dot) / row_nsq[i]
            for j in range(n):
                x[j] += coeff * A[i, j]
            if ptr < n_rec and record_ks[ptr] == k:
                for j in range(n):
                    iterates[ptr, j] = x[j]
                chosen[ptr] = i
                ptr += 1

    return iterates_arr, chosen_arr, int(state)


def jacobi_sweeps(double[:, ::1] work, double[:, ::1] vt, double tol, int max_sweeps):
    cdef Py_ssize_t k = work.shape[0]
    cdef Py_ssize_t m = work.shape[1]
    cdef Py_ssize_t kv = vt.shape[1]
    cdef Py_ssize_t p, q, j
    cdef int sweep, done = 0
    cdef double off = 0.0, gpq, gpp, gqq, apq, tau, t, c, s, wp, wq

    with nogil:
        for sweep in range(1, max_sweeps + 1):
            off = 0.0
            for p in range(k - 1):
                for q in range(p + 1, k):
                    gpq = 0.0
                    for j in range(m):
                        gpq += work[p, j] * work[q, j]
                    apq = fabs(gpq)
                    if apq > off:
                        off = apq
                    if gpq == 0.0:
                        continue
                    gpp = 0.0
                    gqq = 0.0
                    for j in range(m):
                        gpp += work[p, j] * work[p, j]
                        gqq += work[q, j] * work[q, j]
                    tau = (gqq - gpp) / (2.0 * gpq)
                    if tau >= 0.0:
                        t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = c * t
                    for j in range(m):
                        wp = work[p, j]
                        wq = work[q, j]
                        work[p, j] = c * wp - s * wq
                        work[q, j] = s * wp + c * wq
                    for j in range(kv):
                        wp = vt[p, j]
                        wq = vt[q, j]
                        vt[p, j] = c * wp - s * wq
                        vt[q, j] = s * wp + c * wq
            done = sweep
            if off <= tol:
                break

    return done, off
