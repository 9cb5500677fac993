"""Kernel selection: compiled extension when available, pure Python otherwise.

Set ``WARMFLOW_KERNEL=py`` or ``WARMFLOW_KERNEL=c`` to force a choice (the
benchmark and the parity tests use this).  Forcing ``c`` when the extension
is missing raises at import time rather than silently degrading.
"""

from __future__ import annotations

import os

from . import _kernel_py

_forced = os.environ.get("WARMFLOW_KERNEL", "").strip().lower()

if _forced in ("py", "python"):
    _impl = _kernel_py
elif _forced in ("c", "cython", "ext"):
    from . import _kernel_c as _impl  # noqa: F401 - ImportError is the point
else:
    try:
        from . import _kernel_c as _impl
    except ImportError:
        _impl = _kernel_py

IMPLEMENTATION = _impl.IMPLEMENTATION

gap_loop = _impl.gap_loop
vanilla_loop = _impl.vanilla_loop

ERR_NO_NEIGHBOR = _kernel_py.ERR_NO_NEIGHBOR
ERR_RELABEL_BUDGET = _kernel_py.ERR_RELABEL_BUDGET
ERR_HEIGHT_BOUND = _kernel_py.ERR_HEIGHT_BOUND
ERR_BAD_ENTRY = _kernel_py.ERR_BAD_ENTRY


def get_kernels(name):
    """Return (gap_loop, vanilla_loop) for an explicit implementation name."""
    if name in ("py", "python"):
        return _kernel_py.gap_loop, _kernel_py.vanilla_loop
    if name in ("c", "cython", "ext"):
        from . import _kernel_c

        return _kernel_c.gap_loop, _kernel_c.vanilla_loop
    raise ValueError(f"unknown kernel implementation {name!r}")
