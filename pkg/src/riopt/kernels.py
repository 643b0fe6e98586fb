"""Backend selection for the hot loops.

The compiled extension is used when it imports cleanly.  Setting the
environment variable ``RIOPT_PURE_PYTHON=1`` forces the numpy fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("RIOPT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels_c as _compiled  # type: ignore[attr-defined]
    except ImportError:  # pragma: no cover - depends on the build
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "cython"

suffix_max = _impl.suffix_max
upper_hull = _impl.upper_hull
minform_sup = _impl.minform_sup
window_sup_integral = _impl.window_sup_integral


def backends() -> dict:
    """Return the available backends keyed by name."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels_c  # type: ignore[attr-defined]

        out["cython"] = _kernels_c
    except ImportError:  # pragma: no cover
        pass
    return out
