"""Backend selection for the hot numeric kernels.

Every kernel exists twice: a numba ``@njit`` loop version and a vectorised
numpy version.  Set ``SHAMP_NUMBA=0`` in the environment (before import) to
force the pure-numpy path; numba is also skipped when it is not importable.
"""
import os

_FLAG = os.environ.get("SHAMP_NUMBA", "1").strip().lower()

try:
    import numba  # noqa: F401
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _FLAG not in ("0", "false", "no", "off")


def backend_name():
    return "numba" if USE_NUMBA else "numpy"


def get_backend(name=None):
    """Return the kernel module for ``name`` ('numba', 'numpy' or None = active)."""
    name = name or backend_name()
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not installed")
        from . import _kernels_nb
        return _kernels_nb
    if name == "numpy":
        from . import _kernels_np
        return _kernels_np
    raise ValueError(f"unknown backend {name!r}")
