"""Dense real linear algebra: products, norms, powers, and a Jacobi SVD.

Matrices are C-contiguous float64 numpy arrays of shape (m, n); vectors are
1-D float64 arrays.  The validators below are the single entry point that
enforces those conventions plus finiteness, so everything downstream can
assume clean inputs.

The SVD is a one-sided Jacobi iteration (rotations orthogonalize the columns
of the tall operand) rather than a LAPACK call: it is self-contained, has
high relative accuracy on the small dense matrices this package targets, and
exists in both the compiled and the pure-Python backend.
"""

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import DimensionMismatch, NonFiniteInput, SvdConvergenceError

#: Convergence for the Jacobi sweeps: the largest off-diagonal Gram entry
#: |<u_p, u_q>| must fall below this factor times the squared Frobenius norm.
JACOBI_TOL_FACTOR = 1e-14

#: Sweep cap before svd() raises SvdConvergenceError.
JACOBI_MAX_SWEEPS = 60


def as_matrix(a):
    """Validate and return `a` as a 2-D C-contiguous float64 array."""
    out = np.ascontiguousarray(np.asarray(a, dtype=np.float64))
    if out.ndim != 2 or out.shape[0] < 1 or out.shape[1] < 1:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise NonFiniteInput("matrix entries must be finite")
    return out


def as_vector(v, length=None):
    """Validate and return `v` as a 1-D float64 array of optional length."""
    out = np.ascontiguousarray(np.asarray(v, dtype=np.float64))
    if out.ndim != 1 or out.shape[0] < 1:
        raise DimensionMismatch(f"expected a 1-D vector, got shape {out.shape}")
    if length is not None and out.shape[0] != length:
        raise DimensionMismatch(f"expected length {length}, got {out.shape[0]}")
    if not np.all(np.isfinite(out)):
        raise NonFiniteInput("vector entries must be finite")
    return out


def matvec(A, v):
    """A @ v with dimension checking."""
    a = as_matrix(A)
    x = as_vector(v, length=a.shape[1])
    return a @ x


def transpose_matvec(A, v):
    """A.T @ v with dimension checking."""
    a = as_matrix(A)
    x = as_vector(v, length=a.shape[0])
    return a.T @ x


def norm_sq(v):
    """Squared Euclidean norm of a vector."""
    x = np.asarray(v, dtype=np.float64)
    return float(x @ x)


def row_norms_sq(A):
    """Squared Euclidean norm of every row, as an (m,) array."""
    a = as_matrix(A)
    return np.einsum("ij,ij->i", a, a)


def row_norm_sq(A, i):
    """Squared Euclidean norm of row `i`."""
    a = as_matrix(A)
    if not 0 <= i < a.shape[0]:
        raise DimensionMismatch(f"row index {i} out of range for {a.shape[0]} rows")
    return float(a[i] @ a[i])


def frobenius_norm_sq(A):
    """Sum of all squared entries; equals the sum of squared singular values."""
    a = as_matrix(A)
    return float(np.einsum("ij,ij->", a, a))


def power_apply(A, v, ell):
    """Apply A to v `ell` times; ell = 0 returns a copy of v.

    Repeated application (ell >= 2) requires a square matrix.
    """
    a = as_matrix(A)
    x = as_vector(v, length=a.shape[1])
    if ell < 0:
        raise DimensionMismatch("power must be non-negative")
    if ell >= 2 and a.shape[0] != a.shape[1]:
        raise DimensionMismatch("repeated application needs a square matrix")
    out = x.copy()
    for _ in range(ell):
        out = a @ out
    return out


@dataclass(frozen=True)
class SvdResult:
    """Thin singular value decomposition A = U diag(s) V^T.

    singular_values are sorted non-increasing; left_vectors (m, k) and
    right_vectors (n, k) hold orthonormal columns, k = min(m, n).  Each right
    vector's sign is fixed so its largest-magnitude entry is positive, which
    keeps traces that consume singular vectors reproducible.
    """

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    @property
    def sigma_max(self):
        return float(self.singular_values[0])

    @property
    def sigma_min(self):
        return float(self.singular_values[-1])

    def solve(self, b):
        """Least-norm solution of A x = b through the decomposition."""
        rhs = as_vector(b, length=self.left_vectors.shape[0])
        coeff = self.left_vectors.T @ rhs
        return self.right_vectors @ (coeff / self.singular_values)


def svd(A, max_sweeps=JACOBI_MAX_SWEEPS):
    """One-sided Jacobi SVD of a dense matrix.

    Wide inputs are transposed internally.  Raises SvdConvergenceError,
    carrying the achieved off-diagonal magnitude, if the sweep cap is hit
    before the off-diagonal Gram entries fall below
    JACOBI_TOL_FACTOR * ||A||_F^2.
    """
    a = as_matrix(A)
    m, n = a.shape
    transposed = m < n
    tall = a.T if transposed else a
    # Work on rows: row j of `work` is column j of the tall operand.  The
    # copy is load-bearing: sweeps mutate it and must never touch `a`.
    work = tall.T.copy()
    k = work.shape[0]
    vt = np.eye(k)
    tol = JACOBI_TOL_FACTOR * frobenius_norm_sq(a)

    sweeps, off = _backend.jacobi_sweeps(work, vt, tol, max_sweeps)
    if off > tol:
        raise SvdConvergenceError(off_diagonal=off, tolerance=tol, sweeps=sweeps)

    sigmas = np.sqrt(np.einsum("ij,ij->i", work, work))
    order = np.argsort(-sigmas, kind="stable")
    sigmas = sigmas[order]
    work = work[order]
    vt = vt[order]

    scale = np.where(sigmas > 0.0, sigmas, 1.0)
    u = (work / scale[:, None]).T
    v = vt.T
    if transposed:
        u, v = v, u

    # Sign convention: largest-magnitude entry of each right vector positive.
    for j in range(k):
        idx = int(np.argmax(np.abs(v[:, j])))
        if v[idx, j] < 0.0:
            v[:, j] = -v[:, j]
            u[:, j] = -u[:, j]

    return SvdResult(singular_values=sigmas, left_vectors=u, right_vectors=v)
