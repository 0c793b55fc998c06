"""Select the kernel implementation at import time.

The compiled extension is preferred. Set ``COMPACTSEG_BACKEND=python`` to force
the pure-Python fallback (useful for debugging and for the backend benchmark).
"""
import os

from . import _fallback

_requested = os.environ.get("COMPACTSEG_BACKEND", "auto").lower()

_compiled = None
if _requested != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:
        if _requested == "compiled":
            raise

BACKENDS = {"python": _fallback}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

NAME = "compiled" if _compiled is not None else "python"
impl = BACKENDS[NAME]


def get(name=None):
    """Return the kernel module called ``name`` (default: the active one)."""
    if name is None:
        return impl
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"backend {name!r} is not available; have {sorted(BACKENDS)}"
        ) from None
