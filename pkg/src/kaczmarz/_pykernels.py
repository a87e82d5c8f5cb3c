"""Pure-numpy implementations of the two hot kernels.

These mirror kaczmarz._core exactly in semantics: same splitmix64 stream,
same inverse-CDF row selection (first index whose cumulative weight strictly
exceeds the draw), same rotation formulas.  Floating-point results may differ
from the compiled kernels in the last bits because numpy reduces dot products
in a different order; the selected row sequence is identical since it depends
only on exact integer arithmetic and comparisons of identical doubles.
"""

import math

import numpy as np

from .rng import Rng


def run_kernel(A, b, cum, row_nsq, last_pos, x0, state, steps, record_ks):
    """Row-projection iteration; records iterates at the given step indices.

    record_ks must be sorted, start at 0 or later, and end at `steps`.
    Returns (iterates, chosen_rows, final_state); chosen_rows[j] is the row
    applied at step record_ks[j] (-1 for the initial record at k = 0).
    """
    m, n = A.shape
    x = x0.copy()
    n_rec = len(record_ks)
    iterates = np.empty((n_rec, n))
    chosen = np.full(n_rec, -1, dtype=np.int64)
    ptr = 0
    if n_rec and record_ks[0] == 0:
        iterates[0] = x
        ptr = 1
    if steps == 0:
        return iterates, chosen, state

    # The row sequence does not depend on the iterate, so the whole stream
    # can be drawn up front; this matches the per-step draws of the compiled
    # kernel bit for bit.
    rng = Rng(state)
    draws = rng.uniforms(steps)
    targets = draws * cum[-1]
    rows = np.searchsorted(cum, targets, side="right")
    rows[rows >= m] = last_pos

    for k in range(1, steps + 1):
        i = rows[k - 1]
        ai = A[i]
        x += ((b[i] - ai @ x) / row_nsq[i]) * ai
        if ptr < n_rec and record_ks[ptr] == k:
            iterates[ptr] = x
            chosen[ptr] = i
            ptr += 1
    return iterates, chosen, rng.state


def jacobi_sweeps(work, vt, tol, max_sweeps):
    """Cyclic one-sided Jacobi sweeps on the rows of `work`, in place.

    Rows of `work` are the columns being orthogonalized; `vt` accumulates the
    rotations.  Returns (sweeps_done, off) where `off` is the largest
    off-diagonal Gram magnitude observed during the final sweep.
    """
    k = work.shape[0]
    off = 0.0
    for sweep in range(1, max_sweeps + 1):
        off = 0.0
        for p in range(k - 1):
            for q in range(p + 1, k):
                up = work[p]
                uq = work[q]
                gpq = float(up @ uq)
                apq = abs(gpq)
                if apq > off:
                    off = apq
                if gpq == 0.0:
                    continue
                gpp = float(up @ up)
                gqq = float(uq @ uq)
                tau = (gqq - gpp) / (2.0 * gpq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                new_p = c * up - s * uq
                work[q] = s * up + c * uq
                work[p] = new_p
                vp = vt[p]
                new_vp = c * vp - s * vt[q]
                vt[q] = s * vp + c * vt[q]
                vt[p] = new_vp
        if off <= tol:
            return sweep, off
    return max_sweeps, off
