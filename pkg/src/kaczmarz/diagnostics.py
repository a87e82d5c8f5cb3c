"""Decay-bound quantities and the exact one-step expectation oracle.

Write r = x - x_true for the error of an iterate.  Because rows are sampled
with probability p_i = ||a_i||^2 / ||A||_F^2, the conditional expectation of
any functional g after one projection step is the finite sum

    E[g(x')] = sum_i p_i * g(step(x, i)),

which :func:`expected_next` evaluates exactly by enumerating rows.  That
enumeration is the ground truth against which the closed forms below are
checked:

* exact identity (squaring out the projection):

      E ||A r'||^2 = ||A r||^2 - (2/||A||_F^2) ||A^T A r||^2
                     + (1/||A||_F^2) sum_i <a_i, r>^2 ||A a_i||^2 / ||a_i||^2

* one-step decay bound (theorem 1), with
  alpha = max_i ||A a_i||^2 / ||a_i||^2:

      E ||A r'||^2 <= (1 + alpha/||A||_F^2) ||A r||^2
                      - (2/||A||_F^2) ||A^T A r||^2

  valid for square invertible A and for m > n with a unique solution; note
  <a_i, r> = (A r)_i so every term is computable from A x - b alone.

* matrix-power extension for symmetric A (theorem 2), with
  alpha_ell = max_i ||A^ell a_i||^2 / ||a_i||^2:

      E ||A^ell r'||^2 <= (1 + alpha_ell/||A||_F^2) ||A^ell r||^2
                          - (2/||A||_F^2) ||A^(ell+1) r||^2

  The reported bound is this stated form.  Its own derivation actually
  yields the middle term alpha_ell/||A||_F^2 * ||A r||^2, which differs for
  ell >= 2; the stated form can be beaten by error vectors concentrated on
  eigenvalues below one, so the exact expansion (checked as an equality) is
  the authoritative per-step statement.

* one-step spectral decay, for a right singular pair (sigma, v):

      E <r', v> = (1 - sigma^2/||A||_F^2) <r, v>.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    SpdViolationError,
    SymmetryError,
    UnknownDiagnosticError,
    UnknownFunctionalError,
    ZeroRowError,
)
from .errors import IllPosedProblemError, InvalidProblemError
from .linalg import (
    as_matrix,
    as_vector,
    frobenius_norm_sq,
    matvec,
    norm_sq,
    power_apply,
    row_norms_sq,
    svd,
    transpose_matvec,
)
from .solver import _step_raw

# Names accepted by make_functional().
FUNCTIONAL_NAMES = (
    "A_residual_normsq",
    "error_normsq",
    "A_ell_residual_normsq",
    "spectral_coeff",
)


def _require_no_zero_rows(nsq):
    if np.any(nsq == 0.0):
        raise ZeroRowError("matrix has a zero row; row-norm ratios are undefined")


def _require_symmetric(a):
    scale = float(np.max(np.abs(a))) or 1.0
    if a.shape[0] != a.shape[1] or float(np.max(np.abs(a - a.T))) > 1e-12 * scale:
        raise SymmetryError("matrix must be symmetric")


def _row_image_norms_sq(a, ell):
    """||A^ell a_i||^2 for every row i (columns of A^ell A^T)."""
    y = a @ a.T
    for _ in range(ell - 1):
        y = a @ y
    return np.einsum("ij,ij->j", y, y)


def alpha(A):
    """max_i ||A a_i||^2 / ||a_i||^2, the constant of the one-step bound.

    Defined for rectangular m x n matrices as well: each row a_i is an
    n-vector, so A a_i is well formed.  The value always lies in
    [sigma_min^2, sigma_max^2].
    """
    a = as_matrix(A)
    nsq = row_norms_sq(a)
    _require_no_zero_rows(nsq)
    return float(np.max(_row_image_norms_sq(a, 1) / nsq))


def alpha_ell(A, ell):
    """max_i ||A^ell a_i||^2 / ||a_i||^2; requires square A, ell >= 1."""
    a = as_matrix(A)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch("matrix powers need a square matrix")
    if ell < 1:
        raise DimensionMismatch("power must be at least 1")
    nsq = row_norms_sq(a)
    _require_no_zero_rows(nsq)
    return float(np.max(_row_image_norms_sq(a, ell) / nsq))


@dataclass(frozen=True)
class Functional:
    """A named scalar functional of the post-step iterate."""

    name: str
    evaluate: callable

    def __call__(self, x_next):
        return self.evaluate(x_next)


def make_functional(name, A=None, b=None, x_true=None, svd_result=None, ell=None):
    """Resolve a functional name plus its required context.

    A_residual_normsq        ||A x' - b||^2                    (needs A, b)
    error_normsq             ||x' - x_true||^2                 (needs x_true)
    A_ell_residual_normsq    ||A^ell (x' - x_true)||^2,
                             computed as ||A^(ell-1)(A x' - b)||^2
                                                               (needs A, b, ell)
    spectral_coeff           <x' - x_true, v_ell>              (needs x_true,
                             svd_result, 1-based ell)
    """
    if name == "A_residual_normsq":
        a = as_matrix(A)
        bv = as_vector(b, length=a.shape[0])
        return Functional(name, lambda x: norm_sq(a @ x - bv))
    if name == "error_normsq":
        xt = as_vector(x_true)
        return Functional(name, lambda x: norm_sq(x - xt))
    if name == "A_ell_residual_normsq":
        a = as_matrix(A)
        bv = as_vector(b, length=a.shape[0])
        if ell is None or ell < 1:
            raise UnknownFunctionalError("A_ell_residual_normsq needs ell >= 1")
        return Functional(name, lambda x: norm_sq(power_apply(a, a @ x - bv, ell - 1)))
    if name == "spectral_coeff":
        xt = as_vector(x_true)
        if svd_result is None or ell is None:
            raise UnknownFunctionalError("spectral_coeff needs svd_result and ell")
        v = svd_result.right_vectors[:, ell - 1].copy()
        return Functional(name, lambda x: float((x - xt) @ v))
    raise UnknownFunctionalError(
        f"unknown functional {name!r}; expected one of {FUNCTIONAL_NAMES}"
    )


def expected_next(A, b, x, functional):
    """Exact conditional expectation of `functional` after one step.

    Enumerates every nonzero row i with its sampling weight
    ||a_i||^2 / ||A||_F^2 and evaluates the functional on the projected
    iterate.  This is the ground-truth oracle for every expectation claim
    the diagnostics make; nothing here is sampled.
    """
    a = as_matrix(A)
    bv = as_vector(b, length=a.shape[0])
    xv = as_vector(x, length=a.shape[1])
    nsq = row_norms_sq(a)
    total_weight = frobenius_norm_sq(a)
    acc = 0.0
    for i in range(a.shape[0]):
        if nsq[i] == 0.0:
            continue
        x_next = _step_raw(a, bv, xv, i, float(nsq[i]))
        acc += (float(nsq[i]) / total_weight) * functional(x_next)
    return acc


@dataclass(frozen=True)
class BoundReport:
    """One step's bound check.

    lhs_exact armors the check: it is the enumerated expectation, never a
    sample mean.  identity_residual is |lhs_exact - exact expansion| and
    decrement is rhs_bound minus the current squared functional value (the
    predicted expected change; negative means guaranteed expected decay).
    """

    k: int
    lhs_exact: float
    rhs_bound: float
    identity_residual: float
    decrement: float


_ZERO_REPORT_FIELDS = dict(lhs_exact=0.0, rhs_bound=0.0, identity_residual=0.0, decrement=0.0)


def theorem1_report(A, b, x, k=0):
    """Check the one-step decay bound at iterate x.

    Works for square and for m > n instances.  When A x - b is exactly zero
    the report is all zeros rather than 0/0 ratios.
    """
    a = as_matrix(A)
    bv = as_vector(b, length=a.shape[0])
    xv = as_vector(x, length=a.shape[1])
    nsq = row_norms_sq(a)
    _require_no_zero_rows(nsq)
    r_img = a @ xv - bv
    if not np.any(r_img):
        return BoundReport(k=k, **_ZERO_REPORT_FIELDS)
    total_weight = frobenius_norm_sq(a)
    image_nsq = _row_image_norms_sq(a, 1)
    lhs = expected_next(a, bv, xv, make_functional("A_residual_normsq", A=a, b=bv))
    return _assemble_report(
        a, r_img, r_img, nsq, image_nsq, total_weight, lhs, k
    )


def theorem2_report(A, b, x, ell, k=0):
    """Check the matrix-power decay bound; requires symmetric A, ell >= 1.

    With ell = 1 this reproduces theorem1_report exactly (bit for bit): for
    symmetric A the tail term ||A^T (A r)||^2 and ||A^2 r||^2 coincide and
    all shared quantities are computed through the same code paths.
    """
    a = as_matrix(A)
    if ell < 1:
        raise DimensionMismatch("power must be at least 1")
    _require_symmetric(a)
    bv = as_vector(b, length=a.shape[0])
    xv = as_vector(x, length=a.shape[1])
    nsq = row_norms_sq(a)
    _require_no_zero_rows(nsq)
    r_img = a @ xv - bv
    if not np.any(r_img):
        return BoundReport(k=k, **_ZERO_REPORT_FIELDS)
    total_weight = frobenius_norm_sq(a)
    image_nsq = _row_image_norms_sq(a, ell)
    powered = power_apply(a, r_img, ell - 1)
    lhs = expected_next(
        a, bv, xv, make_functional("A_ell_residual_normsq", A=a, b=bv, ell=ell)
    )
    return _assemble_report(a, r_img, powered, nsq, image_nsq, total_weight, lhs, k)


def _assemble_report(a, r_img, powered, nsq, image_nsq, total_weight, lhs, k):
    # powered = A^ell r; for theorem 1, ell = 1 and powered is A r itself.
    base = norm_sq(powered)
    tail = norm_sq(transpose_matvec(a, powered))
    alpha_val = float(np.max(image_nsq / nsq))
    rhs = (1.0 + alpha_val / total_weight) * base - (2.0 / total_weight) * tail
    third = float(np.dot(r_img * r_img, image_nsq / nsq)) / total_weight
    expansion = base - (2.0 / total_weight) * tail + third
    return BoundReport(
        k=k,
        lhs_exact=lhs,
        rhs_bound=rhs,
        identity_residual=abs(lhs - expansion),
        decrement=rhs - base,
    )


@dataclass(frozen=True)
class SpectralCoeffs:
    """Coordinates of the error in the right singular basis.

    coeffs[j] = <x_k - x_true, v_(j+1)> with the matching singular value in
    sigmas[j]; for a complete basis the squared coefficients sum to
    ||x_k - x_true||^2.
    """

    coeffs: np.ndarray
    sigmas: np.ndarray


def spectral_coeffs(x_k, x_true, svd_result):
    """Expand x_k - x_true over the right singular vectors."""
    v = svd_result.right_vectors
    xk = as_vector(x_k, length=v.shape[0])
    xt = as_vector(x_true, length=v.shape[0])
    return SpectralCoeffs(
        coeffs=v.T @ (xk - xt), sigmas=svd_result.singular_values.copy()
    )


def sv_rate(svd_result, frob_sq):
    """Classical expected geometric factor 1 - sigma_min^2 / ||A||_F^2."""
    s_min = svd_result.sigma_min
    if s_min <= 1e-12 * svd_result.sigma_max:
        raise IllPosedProblemError("matrix is numerically singular")
    return 1.0 - (s_min * s_min) / float(frob_sq)


def sobolev_seminorm_sq(L, u, order):
    """Discrete Sobolev seminorms of u for an SPD operator L.

    order 1 returns <L u, u> (gradient energy), order 2 returns <L u, L u>
    (curvature energy).  A first-order value below -1e-12 * ||u||^2 means L
    was not positive semi-definite and raises; tiny negative roundoff is
    clamped to zero.
    """
    if order not in (1, 2):
        raise DimensionMismatch("order must be 1 or 2")
    lu = matvec(L, u)
    if order == 2:
        return norm_sq(lu)
    uv = as_vector(u)
    value = float(lu @ uv)
    if value < -1e-12 * norm_sq(uv):
        raise SpdViolationError(f"<Lu, u> = {value:.3e} is negative; L is not SPD")
    return max(value, 0.0)


class DiagnosticSet:
    """Per-step diagnostic columns resolved against one problem instance.

    Registered names:

    =====================  =====================================================
    theorem1               four columns thm1_{lhs,rhs,identity_residual,
                           decrement} from theorem1_report
    theorem2:<ell>         same four columns for the power bound (symmetric A)
    decrement              the cheap predicted-decay term
                           alpha/||A||_F^2 ||Ax-b||^2 - 2/||A||_F^2 ||A^T(Ax-b)||^2
    spectral_coeff:<ell>   <x - x_true, v_ell>, 1-based ell
    v1_normalized          <(x - x_true)/||x - x_true||, v_1> (0 at the solution)
    h1_seminorm_sq         <A e, e> for e = x - x_true (symmetric A)
    h2_seminorm_sq         ||A e||^2 for e = x - x_true
    =====================  =====================================================

    The singular value decomposition and the bound constant are computed
    once at construction, so a set can be shared across Monte-Carlo runs.
    """

    _PARAMETRIC = ("theorem2", "spectral_coeff")

    def __init__(self, problem, names):
        self.problem = problem
        self._svd = None
        self._entries = []  # (columns tuple, fn(x) -> list of values)
        for name in names:
            self._register(str(name))
        self.columns = tuple(c for cols, _ in self._entries for c in cols)
        if len(set(self.columns)) != len(self.columns):
            raise UnknownDiagnosticError(f"duplicate diagnostic columns in {names!r}")

    def _register(self, name):
        base, _, arg = name.partition(":")
        handler = getattr(self, f"_add_{base}", None)
        if handler is None or base not in (
            "theorem1",
            "theorem2",
            "decrement",
            "spectral_coeff",
            "v1_normalized",
            "h1_seminorm_sq",
            "h2_seminorm_sq",
        ):
            raise UnknownDiagnosticError(f"unknown diagnostic {name!r}")
        if base in self._PARAMETRIC:
            handler(self._parse_ell(name, arg))
        elif arg:
            raise UnknownDiagnosticError(f"diagnostic {base!r} takes no parameter")
        else:
            handler()

    @staticmethod
    def _parse_ell(name, arg):
        try:
            ell = int(arg)
        except ValueError:
            ell = 0
        if ell < 1:
            raise UnknownDiagnosticError(f"diagnostic {name!r} needs a power >= 1")
        return ell

    def _need_svd(self):
        if self._svd is None:
            cached = getattr(self.problem, "svd_result", None)
            self._svd = cached if cached is not None else svd(self.problem.A)
        return self._svd

    def _need_x_true(self, name):
        if self.problem.x_true is None:
            raise InvalidProblemError(f"diagnostic {name!r} needs a known solution")
        return self.problem.x_true

    # -- individual diagnostics ---------------------------------------------

    def _add_theorem1(self):
        p = self.problem

        def evaluate(x):
            rep = theorem1_report(p.A, p.b, x)
            return [rep.lhs_exact, rep.rhs_bound, rep.identity_residual, rep.decrement]

        self._entries.append(
            (("thm1_lhs", "thm1_rhs", "thm1_identity_residual", "thm1_decrement"), evaluate)
        )

    def _add_theorem2(self, ell):
        p = self.problem
        _require_symmetric(p.A)

        def evaluate(x):
            rep = theorem2_report(p.A, p.b, x, ell)
            return [rep.lhs_exact, rep.rhs_bound, rep.identity_residual, rep.decrement]

        tag = f"thm2_l{ell}"
        self._entries.append(
            (
                (f"{tag}_lhs", f"{tag}_rhs", f"{tag}_identity_residual", f"{tag}_decrement"),
                evaluate,
            )
        )

    def _add_decrement(self):
        p = self.problem
        alpha_val = alpha(p.A)
        total_weight = frobenius_norm_sq(p.A)

        def evaluate(x):
            r = p.A @ x - p.b
            term = (alpha_val / total_weight) * norm_sq(r)
            return [term - (2.0 / total_weight) * norm_sq(p.A.T @ r)]

        self._entries.append((("decrement",), evaluate))

    def _add_spectral_coeff(self, ell):
        xt = self._need_x_true("spectral_coeff")
        dec = self._need_svd()
        if ell > dec.right_vectors.shape[1]:
            raise UnknownDiagnosticError(f"spectral_coeff:{ell} exceeds the basis size")
        v = dec.right_vectors[:, ell - 1].copy()
        self._entries.append(((f"spectral_coeff_{ell}",), lambda x: [float((x - xt) @ v)]))

    def _add_v1_normalized(self):
        xt = self._need_x_true("v1_normalized")
        v1 = self._need_svd().right_vectors[:, 0].copy()

        def evaluate(x):
            e = x - xt
            nn = float(np.linalg.norm(e))
            return [float(e @ v1) / nn if nn > 0.0 else 0.0]

        self._entries.append((("v1_normalized",), evaluate))

    def _add_h1_seminorm_sq(self):
        xt = self._need_x_true("h1_seminorm_sq")
        a = self.problem.A
        _require_symmetric(a)
        self._entries.append(
            (("h1_seminorm_sq",), lambda x: [sobolev_seminorm_sq(a, x - xt, 1)])
        )

    def _add_h2_seminorm_sq(self):
        xt = self._need_x_true("h2_seminorm_sq")
        a = self.problem.A
        self._entries.append(
            (("h2_seminorm_sq",), lambda x: [sobolev_seminorm_sq(a, x - xt, 2)])
        )

    # -- evaluation -----------------------------------------------------------

    def evaluate(self, x):
        """Values for every registered column at iterate x, column order."""
        out = []
        for _, fn in self._entries:
            out.extend(float(v) for v in fn(x))
        return out
