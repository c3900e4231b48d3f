"""Kernel backend selection.

The compiled extension is used when it imports; set ``LUTCGH_PURE_PYTHON=1``
to force the numpy fallback.  :func:`use_backend` switches at runtime.
"""

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled


def available():
    return sorted(_BACKENDS)


def use_backend(name):
    """Select ``"cython"`` or ``"python"`` kernels; returns the previous name."""
    global kernels, BACKEND
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available; have {available()}")
    previous = BACKEND
    kernels, BACKEND = _BACKENDS[name], name
    return previous


if os.environ.get("LUTCGH_PURE_PYTHON", "") not in ("", "0") or _compiled is None:
    kernels, BACKEND = _kernels_py, "python"
else:
    kernels, BACKEND = _compiled, "cython"
