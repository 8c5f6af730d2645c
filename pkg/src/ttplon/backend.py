"""Kernel backend selection.

The compiled extension is used when it imports; set ``TTPLON_PURE=1`` to
force the numpy fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _fallback


def _select() -> ModuleType:
    if os.environ.get("TTPLON_PURE", "") not in ("", "0"):
        return _fallback
    try:
        from . import _kernels
    except ImportError:
        return _fallback
    return _kernels


kernels: ModuleType = _select()


def compiled() -> ModuleType | None:
    """The compiled kernel module, or None if it is not built."""
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels


def use(name: str) -> ModuleType:
    """Switch the active backend (``"cython"`` or ``"numpy"``) and return it."""
    global kernels
    if name == "numpy":
        kernels = _fallback
    elif name == "cython":
        mod = compiled()
        if mod is None:
            raise ImportError("the compiled ttplon._kernels extension is not built")
        kernels = mod
    else:
        raise ValueError(f"unknown backend {name!r}")
    return kernels
