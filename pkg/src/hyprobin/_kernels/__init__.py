"""Kernel backend selection.

The hot inner loop of the shooting solver is available both as a Cython
extension and as a pure-Python fallback. The compiled kernel is preferred
when importable; set ``HYPROBIN_PURE_PYTHON=1`` to force the fallback
(used by the benchmark and the backend-parity tests).
"""

import os

if os.environ.get("HYPROBIN_PURE_PYTHON"):
    from ._shoot_py import integrate_radial
    BACKEND = "python"
else:
    try:
        from ._shoot_cy import integrate_radial
        BACKEND = "cython"
    except ImportError:
        from ._shoot_py import integrate_radial
        BACKEND = "python"

__all__ = ["integrate_radial", "BACKEND"]
