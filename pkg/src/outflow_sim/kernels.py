"""Kernel dispatch: compiled extension when importable, numpy fallback otherwise.

Set ``OUTFLOW_SIM_PURE=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if os.environ.get("OUTFLOW_SIM_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # noqa: F811

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py

radius = _impl.radius
explicit_terms = _impl.explicit_terms
viscous_coeffs = _impl.viscous_coeffs
apply_tridiag = _impl.apply_tridiag
solve_shifted = _impl.solve_shifted

__all__ = ["BACKEND", "radius", "explicit_terms", "viscous_coeffs", "apply_tridiag", "solve_shifted"]
