"""Pick the compiled kernels when available, else the numpy fallback.

Set ``HUKCF_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _core_py

if os.environ.get("HUKCF_PURE_PYTHON", "") not in ("", "0"):
    _impl = _core_py
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _core_py

BACKEND = "cython" if _impl is not _core_py else "python"

fhog = _impl.fhog
huber_solve = _impl.huber_solve


def available_backends():
    """Map backend name to kernel module for every importable backend."""
    found = {"python": _core_py}
    try:
        from . import _core
    except ImportError:
        pass
    else:
        found["cython"] = _core
    return found
