"""Verdicts from sequences of numbers computed at shrinking ``t_min``.

Every computation on a finite grid is finite, so statements such as
"the norm is infinite" or "the ratio is bounded" are decided from how a
quantity moves as the grid is pushed towards zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

REFINEMENTS = (1e-10, 1e-20, 1e-30)
FLAT_TOL = 0.10
GROWTH_STEP = 0.25
GROWTH_EXPONENT = 0.1


@dataclass
class EquivalenceReport:
    """Ratio statistics of a quantity across scales.

    Attributes
    ----------
    scales : list of float
        The ``t_min`` values (or other scale parameters).
    values : list of float
        The quantity at each scale.
    verdict : str
        ``"equivalent"`` (flat), ``"diverging"`` or ``"inconclusive"``.
    """

    scales: list
    values: list
    min_ratio: float = math.nan
    max_ratio: float = math.nan
    slope: float = math.nan
    verdict: str = "inconclusive"
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "scales": list(self.scales),
            "values": list(self.values),
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
            "slope": self.slope,
            "verdict": self.verdict,
        }


def loglog_slope(scales: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of ``log value`` against ``log log(2/scale)``."""
    s = np.asarray(scales, dtype=float)
    v = np.asarray(values, dtype=float)
    ok = (v > 0) & np.isfinite(v)
    if ok.sum() < 2:
        return math.nan
    x = np.log(np.log(2.0 / s[ok]))
    y = np.log(v[ok])
    return float(np.polyfit(x, y, 1)[0])


def classify(values: Sequence[float], scales: Sequence[float] = REFINEMENTS) -> str:
    """``"bounded"``, ``"diverging"`` or ``"inconclusive"``.

    Bounded when ``max/min <= 1.10``.  Diverging when the values increase
    at every step and either each step grows by 25% or each step has a
    local exponent of at least 0.1 against ``log(2/t_min)``; any infinite
    value counts as divergence.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return "inconclusive"
    if np.any(np.isinf(v)):
        return "diverging"
    if np.any(~np.isfinite(v)):
        return "inconclusive"
    if np.all(v == 0):
        return "bounded"
    lo, hi = float(np.min(np.abs(v))), float(np.max(np.abs(v)))
    if lo > 0 and hi / lo <= 1.0 + FLAT_TOL:
        return "bounded"
    if v.size >= 2 and np.all(np.diff(v) > 0) and np.all(v > 0):
        step = v[1:] / v[:-1] - 1.0
        L = np.log(2.0 / np.asarray(scales, dtype=float)[: v.size])
        expo = np.log(v[1:] / v[:-1]) / np.log(L[1:] / L[:-1])
        if np.all(step >= GROWTH_STEP) or np.all(expo >= GROWTH_EXPONENT):
            return "diverging"
    return "inconclusive"


def equivalence_report(a: Sequence[float], b: Sequence[float], scales: Sequence[float]) -> EquivalenceReport:
    """Compare two quantities scale by scale through their ratio ``a/b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = a / b
    rep = EquivalenceReport(list(map(float, scales)), [float(x) for x in r])
    fin = r[np.isfinite(r) & (r > 0)]
    if fin.size:
        rep.min_ratio = float(fin.min())
        rep.max_ratio = float(fin.max())
    rep.slope = loglog_slope(scales, r)
    verdict = classify(r, scales)
    rep.verdict = {"bounded": "equivalent"}.get(verdict, verdict)
    return rep
