"""Select the numeric kernel implementation at import time.

Preference order: the compiled extension if it imported cleanly, else the
numpy fallback. Set ``CISIM_BACKEND=python`` or ``CISIM_BACKEND=c`` to force
one side; forcing ``c`` raises if the extension is missing rather than
silently degrading.
"""

from __future__ import annotations

import os

_requested = os.environ.get("CISIM_BACKEND", "").strip().lower()
if _requested not in ("", "c", "python"):
    raise ImportError(
        f"CISIM_BACKEND must be 'c' or 'python', got {_requested!r}"
    )

if _requested == "python":
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        if _requested == "c":
            raise
        from . import _kernels_py as kernels

backend_name: str = kernels.backend_name()
