"""Pure numpy implementations of the hot loops.

Every function here has a compiled twin in ``_kernels_c`` with the same
signature; ``riopt.kernels`` picks one at import time.
"""

from __future__ import annotations

import numpy as np


def suffix_max(x: np.ndarray) -> np.ndarray:
    """Return ``out[i] = max(x[i:])``; +inf propagates."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return x.copy()
    return np.maximum.accumulate(x[::-1])[::-1].copy()


def upper_hull(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of the vertices of the upper concave hull of ``(x, y)``.

    ``x`` must be strictly increasing.  The first and last points are
    always vertices.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    idx = []
    for k in range(n):
        while len(idx) >= 2:
            i, j = idx[-2], idx[-1]
            # drop j if it lies on or below the chord i -> k
            cross = (x[j] - x[i]) * (y[k] - y[i]) - (y[j] - y[i]) * (x[k] - x[i])
            if cross >= 0.0:
                idx.pop()
            else:
                break
        idx.append(k)
    return np.asarray(idx, dtype=np.intp)


def minform_sup(vals: np.ndarray, s: np.ndarray, t: np.ndarray, alpha: float) -> np.ndarray:
    """``out[k] = max_j vals[j] * min(t_k^(1-alpha), t_k * s_j^(-alpha))``."""
    vals = np.asarray(vals, dtype=float)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    out = np.empty(t.size)
    sa = s ** (-alpha)
    for k in range(t.size):
        tk = t[k]
        w = np.minimum(tk ** (1.0 - alpha), tk * sa)
        out[k] = np.max(vals * w)
    return out


def window_sup_integral(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``out[k] = sum_{i<k} w[i] * max(u[i..k])``.

    ``w[i]`` is the weight of the cell between nodes ``i`` and ``i+1``.
    """
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    n = u.size
    out = np.zeros(n)
    for k in range(1, n):
        run = np.maximum.accumulate(u[k::-1])[::-1]
        out[k] = np.dot(w[:k], run[:k])
    return out
