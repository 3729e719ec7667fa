"""Kernel backend selection.

Hot rendering loops ship in two flavours: numba ``@njit`` kernels and a
pure-numpy fallback. The numpy path is selected by setting the environment
variable ``SURGIPLAN_BACKEND=numpy`` (or automatically when numba is not
importable). Both paths must produce bit-identical images.
"""
import os

_FORCED = os.environ.get("SURGIPLAN_BACKEND", "").strip().lower()

if _FORCED == "numpy":
    NUMBA_ENABLED = False
else:
    try:
        import numba  # noqa: F401
        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
