"""Pick the compiled kernels when available, else the numpy fallback.

Set VARJUMP_BACKEND=python to force the fallback.
"""

import os

from . import _fallback

_forced = os.environ.get("VARJUMP_BACKEND", "").strip().lower()

impl = _fallback
NAME = "python"
if _forced not in ("python", "py", "fallback"):
    try:
        from . import _core as impl  # type: ignore[no-redef]
        NAME = "cython"
    except ImportError:
        impl = _fallback

fallback = _fallback


def compiled():
    """Return the compiled module or None."""
    try:
        from . import _core
    except ImportError:
        return None
    return _core
