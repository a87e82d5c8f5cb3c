"""The projection update, the iteration driver, and trace recording.

One step projects the iterate onto the hyperplane of a sampled equation:

    x' = x + (b_i - <a_i, x>) / ||a_i||^2 * a_i

so <a_i, x'> = b_i up to roundoff and the move is parallel to a_i.  For a
consistent system the error never grows:

    ||x' - x_true||^2 = ||x - x_true||^2 - <a_i, x - x_true>^2 / ||a_i||^2.

A single run is strictly sequential; independent runs may execute
concurrently, each owning its generator and trace while sharing the
immutable ProblemInstance.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import (
    DimensionMismatch,
    InvalidProblemError,
    NumericFailureError,
    ZeroRowError,
)
from .linalg import as_matrix, as_vector, matvec, row_norms_sq
from .rng import Rng
from .sampling import build_row_sampler


@dataclass(frozen=True)
class ProblemInstance:
    """A consistent least-squares instance (A, b) with start point x0.

    x_true, when present, must satisfy A x_true = b to tolerance
    1e-10 * (1 + ||b||); error norms are only traced when it is known.
    svd_result optionally carries the decomposition a builder already paid
    for, so diagnostics do not recompute it.
    """

    A: np.ndarray
    b: np.ndarray
    x0: np.ndarray
    x_true: np.ndarray | None = None
    svd_result: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        a = as_matrix(self.A)
        m, n = a.shape
        if m < n:
            raise InvalidProblemError(f"need at least as many rows as columns, got {m}x{n}")
        b = as_vector(self.b, length=m)
        x0 = as_vector(self.x0, length=n)
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "x0", x0)
        if self.x_true is not None:
            xt = as_vector(self.x_true, length=n)
            gap = float(np.linalg.norm(a @ xt - b))
            if gap > 1e-10 * (1.0 + float(np.linalg.norm(b))):
                raise InvalidProblemError(
                    f"x_true does not solve the system: ||A x_true - b|| = {gap:.3e}"
                )
            object.__setattr__(self, "x_true", xt)

    @property
    def shape(self):
        return self.A.shape


@dataclass
class TraceRow:
    """Quantities recorded at one step of a run."""

    k: int
    residual_norm: float
    iterate_norm: float
    error_norm: float | None = None
    chosen_row: int | None = None
    extras: dict = field(default_factory=dict)


@dataclass
class Trace:
    """Recorded history of one run plus the configuration that produced it."""

    steps: list
    seed: int
    record_stride: int
    diagnostic_columns: tuple = ()
    final_x: np.ndarray | None = None

    def column(self, name):
        """All recorded values of one column as a float array."""
        if name == "k":
            return np.array([row.k for row in self.steps], dtype=np.float64)
        if name in ("residual_norm", "iterate_norm", "error_norm"):
            return np.array([getattr(row, name) for row in self.steps], dtype=np.float64)
        return np.array([row.extras[name] for row in self.steps], dtype=np.float64)


def kaczmarz_step(A, b, x, i):
    """Project x onto the hyperplane of equation i; returns the new iterate."""
    a = as_matrix(A)
    bv = as_vector(b, length=a.shape[0])
    xv = as_vector(x, length=a.shape[1])
    if not 0 <= i < a.shape[0]:
        raise DimensionMismatch(f"row index {i} out of range")
    nsq = float(a[i] @ a[i])
    if nsq == 0.0:
        raise ZeroRowError(f"cannot project onto zero row {i}")
    return _step_raw(a, bv, xv, i, nsq)


def _step_raw(a, b, x, i, row_nsq):
    # Update assumed validated; shared with the expectation oracle.
    ai = a[i]
    return x + ((b[i] - float(ai @ x)) / row_nsq) * ai


def residual(A, b, x):
    """The right-hand-side residual A x - b."""
    a = as_matrix(A)
    bv = as_vector(b, length=a.shape[0])
    return matvec(a, x) - bv


def record_steps(steps, record_stride):
    """Sorted record grid: step 0, every stride, and the final step."""
    if steps < 0:
        raise DimensionMismatch("steps must be non-negative")
    if record_stride < 1:
        raise DimensionMismatch("record_stride must be at least 1")
    ks = list(range(0, steps + 1, record_stride))
    if ks[-1] != steps:
        ks.append(steps)
    return np.asarray(ks, dtype=np.int64)


def run(problem, steps, seed, record_stride=1, diagnostics=()):
    """Run the randomized iteration and return its Trace.

    Rows are drawn with probability ||a_i||^2 / ||A||_F^2 from the seeded
    stream; a TraceRow is recorded at step 0, every `record_stride` steps and
    at the final step.  `diagnostics` is a sequence of registered diagnostic
    names, or a prebuilt DiagnosticSet (which lets Monte-Carlo sweeps share
    one SVD across runs).  Identical (problem, steps, seed) reruns produce
    bitwise-identical traces.

    Raises NumericFailureError naming the step if a recorded residual norm
    is not finite.
    """
    if not isinstance(problem, ProblemInstance):
        raise InvalidProblemError("run() needs a ProblemInstance")
    diag_set = _resolve_diagnostics(problem, diagnostics)
    sampler = build_row_sampler(problem.A)
    ks = record_steps(steps, record_stride)

    rng = Rng(seed)
    iterates, chosen, final_state = _backend.run_kernel(
        problem.A,
        problem.b,
        sampler.cumulative_weights,
        row_norms_sq(problem.A),
        sampler.last_positive,
        problem.x0,
        rng.state,
        int(steps),
        ks,
    )
    rng.state = final_state

    columns = diag_set.columns if diag_set is not None else ()
    rows = []
    for j, k in enumerate(ks):
        x = iterates[j]
        res_norm = float(np.linalg.norm(problem.A @ x - problem.b))
        if not np.isfinite(res_norm):
            raise NumericFailureError(step=int(k))
        row = TraceRow(
            k=int(k),
            residual_norm=res_norm,
            iterate_norm=float(np.linalg.norm(x)),
            error_norm=(
                float(np.linalg.norm(x - problem.x_true))
                if problem.x_true is not None
                else None
            ),
            chosen_row=int(chosen[j]) if chosen[j] >= 0 else None,
        )
        if diag_set is not None:
            row.extras = dict(zip(columns, diag_set.evaluate(x)))
        rows.append(row)

    return Trace(
        steps=rows,
        seed=int(seed),
        record_stride=int(record_stride),
        diagnostic_columns=tuple(columns),
        final_x=iterates[-1].copy(),
    )


def _resolve_diagnostics(problem, diagnostics):
    if diagnostics is None:
        return None
    if hasattr(diagnostics, "evaluate") and hasattr(diagnostics, "columns"):
        return diagnostics
    names = tuple(diagnostics)
    if not names:
        return None
    from .diagnostics import DiagnosticSet

    return DiagnosticSet(problem, names)
