"""Kernel backend selection.

The compiled extension is used when it imports; setting ``CLIFFPART_PURE=1``
forces the numpy fallback.  ``BACKEND`` names the active choice.
"""

from __future__ import annotations

import os

from . import _pykernels

__all__ = ["BACKEND", "brute_force_sum", "multisum_accumulate", "backend_module"]


def backend_module(name: str | None = None):
    """Return the kernel module for ``name`` ('compiled' or 'python')."""
    if name == "python":
        return _pykernels
    if name in (None, "compiled"):
        try:
            from . import _kernels
        except ImportError:
            if name == "compiled":
                raise
            return _pykernels
        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


_mod = _pykernels if os.environ.get("CLIFFPART_PURE") == "1" else backend_module()
BACKEND = "python" if _mod is _pykernels else "compiled"
brute_force_sum = _mod.brute_force_sum
multisum_accumulate = _mod.multisum_accumulate
