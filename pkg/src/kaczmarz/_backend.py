"""Kernel backend selection.

The compiled extension (kaczmarz._core) is used when importable; otherwise
the numpy kernels take over.  KACZMARZ_BACKEND=python or =compiled forces a
choice ("compiled" raises if the extension is missing).  Within one backend
all results are bitwise deterministic; across backends the selected row
sequences agree exactly while floating-point values agree to roundoff.
"""

import os

from . import _pykernels

_choice = os.environ.get("KACZMARZ_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "python", "compiled"):
    raise ImportError(f"KACZMARZ_BACKEND must be auto, python or compiled, not {_choice!r}")

_core = None
if _choice in ("auto", "compiled"):
    try:
        from . import _core as _core_mod

        _core = _core_mod
    except ImportError:
        if _choice == "compiled":
            raise
        _core = None

if _core is not None:
    BACKEND = "compiled"
    run_kernel = _core.run_kernel
    jacobi_sweeps = _core.jacobi_sweeps
else:
    BACKEND = "python"
    run_kernel = _pykernels.run_kernel
    jacobi_sweeps = _pykernels.jacobi_sweeps


def backend_name():
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return BACKEND


def available_backends():
    """Names of importable backends, active one first."""
    if _core is not None:
        return ("compiled", "python")
    try:
        from . import _core as probe  # noqa: F401

        return ("python", "compiled")
    except ImportError:
        return ("python",)


def get_kernels(name):
    """Fetch (run_kernel, jacobi_sweeps) for an explicit backend name."""
    if name == "python":
        return _pykernels.run_kernel, _pykernels.jacobi_sweeps
    if name == "compiled":
        from . import _core as core

        return core.run_kernel, core.jacobi_sweeps
    raise ValueError(f"unknown backend {name!r}")
