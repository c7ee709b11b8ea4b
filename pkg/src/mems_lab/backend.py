"""Kernel backend selection.

The compiled Cython core is preferred when importable; the pure-Python
mirror is the fallback.  ``MEMS_LAB_BACKEND=pure`` or ``=compiled`` forces
the choice (forcing ``compiled`` raises if the extension is missing, rather
than silently running slow).
"""

from __future__ import annotations

import os

from . import _core_py

_FORCED = os.environ.get("MEMS_LAB_BACKEND", "").strip().lower()

if _FORCED == "pure":
    _kernel = _core_py
    BACKEND = "pure"
elif _FORCED == "compiled":
    from . import _core as _kernel  # noqa: F401

    BACKEND = "compiled"
elif _FORCED:
    raise RuntimeError(
        f"MEMS_LAB_BACKEND={_FORCED!r} not understood; use 'pure' or 'compiled'"
    )
else:
    try:
        from . import _core as _kernel  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _kernel = _core_py
        BACKEND = "pure"


def get_kernel():
    """Active kernel module (compiled extension or pure-Python mirror)."""
    return _kernel


def pure_kernel():
    """The pure-Python kernel, always available (callable-RHS path)."""
    return _core_py
