"""Import-time selection of the solver's inner-loop backend.

Prefers the compiled extension and falls back to the numpy implementation.
Set OVERDEPTH_BACKEND=python to force the fallback, or =c to insist on the
extension (raising if it was not built).  ``overdepth bench`` compares the
two.
"""

from __future__ import annotations

import os

from . import _kernels_py

_choice = os.environ.get("OVERDEPTH_BACKEND", "auto").strip().lower()

if _choice in ("auto", ""):
    try:
        from . import _kernels as _impl

        BACKEND = "c"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"
elif _choice in ("c", "compiled", "native"):
    from . import _kernels as _impl

    BACKEND = "c"
elif _choice in ("python", "py"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    raise ValueError(f"unknown OVERDEPTH_BACKEND value: {_choice!r}")

posterior_select = _impl.posterior_select


def available_backends() -> dict[str, object]:
    """Name -> module for every importable backend (for tests/benchmarks)."""
    found: dict[str, object] = {"python": _kernels_py}
    try:
        from . import _kernels

        found["c"] = _kernels
    except ImportError:
        pass
    return found
