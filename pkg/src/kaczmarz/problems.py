"""Instance generators, a 1-D discrete Laplacian, and text-file ingestion.

Generators are pure functions of their seed.  Inside :func:`build_problem`
the three random roles draw from separated streams so changing one does not
shift the others:

    matrix entries   seed itself (same matrix as calling the generator)
    x_true draw      derive_run_seed(seed, 1)   (rhs = from_solution)
    x0 draw          derive_run_seed(seed, 2)   (x0 = gaussian)

The text format is diffable plain text: matrices start with a "rows cols"
header line followed by one whitespace-separated row per line; vectors start
with a single "length" line followed by one entry per line.  Values are
written with 17 significant digits, which round-trips float64 exactly.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    IllPosedProblemError,
    InvalidProblemError,
    MatrixFormatError,
)
from .linalg import as_matrix, as_vector, svd
from .rng import derive_run_seed, new_rng
from .solver import ProblemInstance

PROBLEM_KINDS = ("gaussian_row_normalized", "symmetric_gaussian", "laplacian_1d", "from_file")
RHS_MODES = ("ones", "from_solution", "from_file")
X0_MODES = ("zero", "gaussian", "from_file")

#: build_problem refuses instances with sigma_min below this times sigma_max.
SIGMA_MIN_FLOOR = 1e-10


@dataclass(frozen=True)
class ProblemSpec:
    """Declarative description of a problem instance.

    n and m are ignored for kind="from_file" (shapes come from the file);
    m defaults to n elsewhere.  Paths are only consulted for the from_file
    kinds/modes.
    """

    kind: str
    n: int | None = None
    m: int | None = None
    seed: int = 0
    rhs: str = "ones"
    x0: str = "zero"
    matrix_path: str | None = None
    rhs_path: str | None = None
    x0_path: str | None = None

    def __post_init__(self):
        if self.kind not in PROBLEM_KINDS:
            raise ConfigError("kind", f"expected one of {PROBLEM_KINDS}, got {self.kind!r}")
        if self.rhs not in RHS_MODES:
            raise ConfigError("rhs", f"expected one of {RHS_MODES}, got {self.rhs!r}")
        if self.x0 not in X0_MODES:
            raise ConfigError("x0", f"expected one of {X0_MODES}, got {self.x0!r}")
        if self.kind != "from_file":
            if self.n is None or self.n < 2:
                raise ConfigError("n", "dimension must be at least 2")
            if self.m is not None and self.m < self.n:
                raise ConfigError("m", "need at least as many rows as columns")
        elif self.matrix_path is None:
            raise ConfigError("matrix_file", "kind=from_file needs a matrix path")


def gen_gaussian_row_normalized(n, m, seed):
    """m x n matrix of independent standard normals with unit-norm rows."""
    rng = new_rng(seed)
    a = rng.normals(m * n).reshape(m, n)
    norms = np.sqrt(np.einsum("ij,ij->i", a, a))
    return a / norms[:, None]


def gen_symmetric_gaussian(n, seed):
    """Symmetrized Gaussian matrix (G + G^T) / 2.

    Rows are deliberately not normalized: normalization would destroy the
    symmetry the power bound requires.
    """
    g = new_rng(seed).normals(n * n).reshape(n, n)
    return (g + g.T) / 2.0


def gen_laplacian_1d(n):
    """Tridiagonal (-1, 2, -1) operator with Dirichlet boundaries; SPD."""
    lap = 2.0 * np.eye(n)
    off = np.arange(n - 1)
    lap[off, off + 1] = -1.0
    lap[off + 1, off] = -1.0
    return lap


# -- text file format --------------------------------------------------------


def _format_value(v):
    return format(float(v), ".17g")


def save_matrix(path, A):
    """Write a matrix in the "rows cols" header text format."""
    a = as_matrix(A)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{a.shape[0]} {a.shape[1]}\n")
        for row in a:
            fh.write(" ".join(_format_value(v) for v in row) + "\n")


def save_vector(path, v):
    """Write a vector: a length header line then one entry per line."""
    vec = as_vector(v)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{vec.shape[0]}\n")
        for value in vec:
            fh.write(_format_value(value) + "\n")


def _read_lines(path):
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    return lines


def _parse_floats(tokens, line_no):
    out = np.empty(len(tokens))
    for j, tok in enumerate(tokens):
        try:
            out[j] = float(tok)
        except ValueError:
            raise MatrixFormatError(line_no, f"not a number: {tok!r}") from None
    if not np.all(np.isfinite(out)):
        raise MatrixFormatError(line_no, "non-finite value")
    return out


def load_matrix(path):
    """Parse a matrix file; errors carry the offending 1-based line number."""
    lines = _read_lines(path)
    if not lines:
        raise MatrixFormatError(1, "empty file")
    header = lines[0].split()
    if len(header) != 2 or not all(tok.lstrip("+").isdigit() for tok in header):
        raise MatrixFormatError(1, f"expected 'rows cols' header, got {lines[0]!r}")
    m, n = int(header[0]), int(header[1])
    if m < 1 or n < 1:
        raise MatrixFormatError(1, "matrix dimensions must be positive")
    if len(lines) - 1 != m:
        raise MatrixFormatError(
            min(len(lines) + 1, m + 2), f"expected {m} rows, found {len(lines) - 1}"
        )
    out = np.empty((m, n))
    for i in range(m):
        tokens = lines[1 + i].split()
        if len(tokens) != n:
            raise MatrixFormatError(2 + i, f"expected {n} entries, found {len(tokens)}")
        out[i] = _parse_floats(tokens, 2 + i)
    return out


def load_vector(path):
    """Parse a vector file; errors carry the offending 1-based line number."""
    lines = _read_lines(path)
    if not lines:
        raise MatrixFormatError(1, "empty file")
    header = lines[0].split()
    if len(header) != 1 or not header[0].lstrip("+").isdigit():
        raise MatrixFormatError(1, f"expected a length header, got {lines[0]!r}")
    length = int(header[0])
    if length < 1:
        raise MatrixFormatError(1, "vector length must be positive")
    if len(lines) - 1 != length:
        raise MatrixFormatError(
            min(len(lines) + 1, length + 2),
            f"expected {length} entries, found {len(lines) - 1}",
        )
    out = np.empty(length)
    for i in range(length):
        tokens = lines[1 + i].split()
        if len(tokens) != 1:
            raise MatrixFormatError(2 + i, f"expected 1 entry, found {len(tokens)}")
        out[i] = _parse_floats(tokens, 2 + i)[0]
    return out


# -- instance construction ----------------------------------------------------


def build_problem(spec):
    """Materialize a ProblemSpec into a consistent ProblemInstance.

    rhs = ones solves A x_true = (1, ..., 1) through the in-package SVD so
    error norms are available; this requires a square instance (a rectangular
    system with a fixed right-hand side is generally inconsistent).  The
    construction raises IllPosedProblemError when sigma_min falls below
    1e-10 * sigma_max.
    """
    a = _build_matrix(spec)
    m, n = a.shape
    decomposition = None

    if spec.rhs == "ones":
        if m != n:
            raise InvalidProblemError("rhs=ones needs a square matrix to stay consistent")
        b = np.ones(m)
        decomposition = svd(a)
        if decomposition.sigma_min <= SIGMA_MIN_FLOOR * decomposition.sigma_max:
            raise IllPosedProblemError(
                f"sigma_min {decomposition.sigma_min:.3e} too small for a reliable solve"
            )
        x_true = decomposition.solve(b)
    elif spec.rhs == "from_solution":
        x_true = new_rng(derive_run_seed(spec.seed, 1)).normals(n)
        b = a @ x_true
    else:  # from_file
        if spec.rhs_path is None:
            raise ConfigError("rhs_file", "rhs=from_file needs a vector path")
        b = as_vector(load_vector(spec.rhs_path), length=m)
        x_true = None

    if spec.x0 == "zero":
        x0 = np.zeros(n)
    elif spec.x0 == "gaussian":
        x0 = new_rng(derive_run_seed(spec.seed, 2)).normals(n)
    else:
        if spec.x0_path is None:
            raise ConfigError("x0_file", "x0=from_file needs a vector path")
        x0 = as_vector(load_vector(spec.x0_path), length=n)

    return ProblemInstance(A=a, b=b, x0=x0, x_true=x_true, svd_result=decomposition)


def _build_matrix(spec):
    if spec.kind == "gaussian_row_normalized":
        return gen_gaussian_row_normalized(spec.n, spec.m or spec.n, spec.seed)
    if spec.kind == "symmetric_gaussian":
        return gen_symmetric_gaussian(spec.n, spec.seed)
    if spec.kind == "laplacian_1d":
        return gen_laplacian_1d(spec.n)
    return as_matrix(load_matrix(spec.matrix_path))
