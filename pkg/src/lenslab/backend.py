"""Kernel backend selection: compiled extension when available, NumPy otherwise.

Set ``LENSLAB_BACKEND=python`` or ``=compiled`` to force a choice; the default
``auto`` prefers the extension and silently falls back.  Both backends run the
same stepping sequence, so they agree to floating-point association order.
"""

from __future__ import annotations

import math
import os

from . import _kernels_py
from .errors import NumericalFailure

_choice = os.environ.get("LENSLAB_BACKEND", "auto")
if _choice not in ("auto", "python", "compiled"):
    raise ValueError(f"LENSLAB_BACKEND must be auto/python/compiled, got {_choice!r}")

_impl = _kernels_py
BACKEND = "python"
if _choice != "python":
    try:
        from . import _kernels as _compiled

        _impl = _compiled
        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise


def available_backends():
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401

        names.append("compiled")
    except ImportError:
        pass
    return names


def kernel_for(name: str):
    """Return the raw advance kernel of a named backend (used by benchmarks/tests)."""
    if name == "python":
        return _kernels_py.harmonic_advance
    if name == "compiled":
        from . import _kernels

        return _kernels.harmonic_advance
    raise ValueError(f"unknown backend {name!r}")


def harmonic_advance(coeffs, values, analysis, t0, h_out, n_steps, theta, p, nonlinear):
    """Run the selected kernel; promote a flagged failure to :class:`NumericalFailure`."""
    out, substeps, fail_time = _impl.harmonic_advance(
        coeffs, values, analysis, t0, h_out, n_steps, theta, p, nonlinear
    )
    if not math.isnan(fail_time):
        raise NumericalFailure(
            f"split-step state left the stable range near t={fail_time:.6g}",
            when=fail_time,
        )
    return out, substeps
