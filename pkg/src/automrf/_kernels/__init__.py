"""Kernel backend selection.

The compiled Cython kernel is preferred; the pure-Python twin is the
fallback.  Both produce bit-identical arrangements.  Set
``AUTOMRF_KERNEL=py`` or ``AUTOMRF_KERNEL=c`` to force a backend
(``c`` raises if the extension is missing).
"""

import os

_force = os.environ.get("AUTOMRF_KERNEL", "").strip().lower()
if _force not in ("", "c", "py"):
    raise ImportError(f"AUTOMRF_KERNEL must be 'c' or 'py', got {_force!r}")

if _force == "py":
    from .gibbs_py import run_sweeps

    BACKEND = "python"
else:
    try:
        from ._gibbs import run_sweeps  # type: ignore[no-redef]

        BACKEND = "c"
    except ImportError:
        if _force == "c":
            raise
        from .gibbs_py import run_sweeps  # type: ignore[no-redef]

        BACKEND = "python"

__all__ = ["run_sweeps", "BACKEND"]
