"""Row selection with probability proportional to squared row norm.

A draw u in [0, 1) is scaled by the total weight W = ||A||_F^2 and mapped to
the first index whose cumulative weight strictly exceeds u * W (inverse CDF).
The strict inequality means zero-norm rows, whose cumulative increment is
zero, can never be selected.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidProblemError
from .linalg import as_matrix, row_norms_sq


@dataclass(frozen=True)
class RowSampler:
    """Immutable inverse-CDF sampler over matrix rows.

    cumulative_weights[i] is the partial sum of squared row norms through
    row i; the last entry is the total weight.  last_positive is the index
    of the final nonzero row, used to clamp the astronomically rare draw
    that rounds up to the total weight.
    """

    cumulative_weights: np.ndarray
    last_positive: int

    @property
    def n_rows(self):
        return self.cumulative_weights.shape[0]

    @property
    def total_weight(self):
        return float(self.cumulative_weights[-1])

    def probabilities(self):
        """Selection probability of each row (zero rows get 0)."""
        cum = self.cumulative_weights
        weights = np.diff(cum, prepend=0.0)
        return weights / cum[-1]


def build_row_sampler(A):
    """Sampler with p_i proportional to the squared norm of row i."""
    a = as_matrix(A)
    nsq = row_norms_sq(a)
    if not np.any(nsq > 0.0):
        raise InvalidProblemError("cannot sample rows of an all-zero matrix")
    cum = np.cumsum(nsq)
    last_positive = int(np.nonzero(nsq)[0][-1])
    return RowSampler(cumulative_weights=cum, last_positive=last_positive)


def sample(sampler, rng):
    """Draw one row index; advances `rng` by exactly one uniform."""
    target = rng.next_uniform() * sampler.cumulative_weights[-1]
    i = int(np.searchsorted(sampler.cumulative_weights, target, side="right"))
    if i >= sampler.n_rows:
        i = sampler.last_positive
    return i


def sample_many(sampler, rng, count):
    """Vectorized :func:`sample`; returns an int64 array of `count` indices.

    Produces exactly the indices `count` scalar calls would, consuming the
    same `count` uniforms.
    """
    cum = sampler.cumulative_weights
    targets = rng.uniforms(count) * cum[-1]
    rows = np.searchsorted(cum, targets, side="right")
    rows[rows >= sampler.n_rows] = sampler.last_positive
    return rows.astype(np.int64, copy=False)
