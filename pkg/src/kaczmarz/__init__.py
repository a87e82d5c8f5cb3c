"""Randomized Kaczmarz least-squares solver with exact expectation diagnostics.

The solver projects its iterate onto one randomly chosen equation per step,
with rows sampled proportionally to their squared norms.  Alongside the loop
itself the package carries a verification engine: an exact row-enumeration
expectation oracle that checks the one-step decay identities and bounds, and
an experiment CLI that replays the reference experiments and writes CSV.

Hot kernels run from a compiled extension when it is built, with a pure
numpy fallback selected at import; see kaczmarz._backend.
"""

from ._backend import available_backends, backend_name
from .diagnostics import (
    BoundReport,
    DiagnosticSet,
    SpectralCoeffs,
    alpha,
    alpha_ell,
    expected_next,
    make_functional,
    sobolev_seminorm_sq,
    spectral_coeffs,
    sv_rate,
    theorem1_report,
    theorem2_report,
)
from .linalg import (
    SvdResult,
    frobenius_norm_sq,
    matvec,
    power_apply,
    row_norm_sq,
    row_norms_sq,
    svd,
    transpose_matvec,
)
from .problems import (
    ProblemSpec,
    build_problem,
    gen_gaussian_row_normalized,
    gen_laplacian_1d,
    gen_symmetric_gaussian,
    load_matrix,
    load_vector,
    save_matrix,
    save_vector,
)
from .rng import Rng, derive_run_seed, new_rng
from .sampling import RowSampler, build_row_sampler, sample, sample_many
from .solver import ProblemInstance, Trace, TraceRow, kaczmarz_step, residual, run

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "DiagnosticSet",
    "ProblemInstance",
    "ProblemSpec",
    "RowSampler",
    "Rng",
    "SpectralCoeffs",
    "SvdResult",
    "Trace",
    "TraceRow",
    "alpha",
    "alpha_ell",
    "available_backends",
    "backend_name",
    "build_problem",
    "build_row_sampler",
    "derive_run_seed",
    "expected_next",
    "frobenius_norm_sq",
    "gen_gaussian_row_normalized",
    "gen_laplacian_1d",
    "gen_symmetric_gaussian",
    "kaczmarz_step",
    "load_matrix",
    "load_vector",
    "make_functional",
    "matvec",
    "new_rng",
    "power_apply",
    "residual",
    "row_norm_sq",
    "row_norms_sq",
    "run",
    "sample",
    "sample_many",
    "save_matrix",
    "save_vector",
    "sobolev_seminorm_sq",
    "spectral_coeffs",
    "sv_rate",
    "svd",
    "theorem1_report",
    "theorem2_report",
    "transpose_matvec",
]
