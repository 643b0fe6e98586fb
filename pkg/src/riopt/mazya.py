"""The model domain of the Maz'ya class and fundamental-function bounds.

The domain is a body of revolution whose cross-section radius at depth
``t`` is ``eta(t)``; its isoperimetric profile behaves like ``t**alpha``.
The functions below evaluate the fundamental function of an
operator-induced space from the fundamental function of the target,
together with its two-sided bounds and the auxiliary function ``psi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate as spi
from scipy.special import gamma as gamma_fn

from . import kernels
from .errors import DomainError, ParameterError, PreconditionError
from .funcrep import Grid, GridFn, PowLogFn, default_grid, grid_from_env, make_log_grid, quad_powlog
from .spaces import FundamentalFn, _as_fundamental
from .trend import REFINEMENTS, classify

_TOL = 1e-12


def unit_ball_volume(d: int) -> float:
    """Lebesgue measure of the unit ball in ``R^d``."""
    return math.pi ** (d / 2.0) / gamma_fn(d / 2.0 + 1.0)


@dataclass(frozen=True)
class MazyaParams:
    """Dimension, isoperimetric exponent and order of derivatives.

    ``alpha`` must lie in ``[1 - 1/n, 1)``.  ``omega`` is the measure of
    the unit ball in dimension ``n - 1``.
    """

    n: int
    alpha: float
    m: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ParameterError(f"n must be an integer >= 2, got {self.n}")
        if int(self.m) != self.m or self.m < 1:
            raise ParameterError(f"m must be a positive integer, got {self.m}")
        if not (1.0 - 1.0 / self.n - _TOL <= self.alpha < 1.0):
            raise ParameterError(f"alpha must lie in [1 - 1/n, 1) = [{1 - 1 / self.n:g}, 1), got {self.alpha}")

    @property
    def omega(self) -> float:
        return unit_ball_volume(self.n - 1)

    @property
    def n_prime(self) -> float:
        return self.n / (self.n - 1.0)

    @property
    def length(self) -> float:
        """Depth of the domain, ``1/(1 - alpha)``."""
        return 1.0 / (1.0 - self.alpha)


def eta(p: MazyaParams, t):
    """Cross-section radius ``omega**(-1/(n-1)) (1 - (1-alpha) t)**(alpha/((1-alpha)(n-1)))``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > p.length * (1 + 1e-15)):
        raise DomainError(f"t must lie in [0, {p.length:g}]")
    expo = p.alpha / ((1.0 - p.alpha) * (p.n - 1))
    base = np.maximum(1.0 - (1.0 - p.alpha) * t, 0.0)
    out = p.omega ** (-1.0 / (p.n - 1)) * base**expo
    return out if out.ndim else float(out)


def omega_volume(p: MazyaParams) -> float:
    """Volume ``int omega * eta(t)**(n-1) dt`` by adaptive quadrature."""
    val, _ = spi.quad(lambda t: p.omega * eta(p, t) ** (p.n - 1), 0.0, p.length, epsabs=0.0, epsrel=1e-13, limit=200)
    return float(val)


@dataclass(frozen=True)
class IsoProfile:
    """Isoperimetric profile ``I(t) = t**alpha`` of the model domain."""

    alpha: float

    @property
    def I(self) -> PowLogFn:
        return PowLogFn([(1.0, self.alpha, 0.0)])

    def __call__(self, t):
        return np.asarray(t, dtype=float) ** self.alpha

    def inv_integral(self, lo, hi):
        """``int_lo^hi dtau / I(tau)``."""
        k = 1.0 - self.alpha
        return (np.asarray(hi, dtype=float) ** k - np.asarray(lo, dtype=float) ** k) / k

    def reciprocal_integral(self) -> float:
        """``int_0^1 ds / I(s)``; finite exactly when ``alpha < 1``."""
        return 1.0 / (1.0 - self.alpha) if self.alpha < 1.0 else math.inf


def model_profile(alpha: float, n: int | None = None) -> IsoProfile:
    """The profile ``t**alpha`` for ``alpha in [1 - 1/n, 1)``."""
    lo = 1.0 - 1.0 / n if n is not None else 0.5
    if not (lo - _TOL <= alpha < 1.0):
        raise ParameterError(f"alpha must lie in [{lo:g}, 1), got {alpha}")
    return IsoProfile(float(alpha))


# --------------------------------------------------------------------------
# fundamental function of the operator-induced space


def _phi_at(phi: FundamentalFn, x) -> np.ndarray:
    return np.asarray(phi(np.asarray(x, dtype=float)), dtype=float)


def _check_vanishing(phi: FundamentalFn) -> bool:
    return phi.at0 == 0.0


def thm31_lower(phi_Y, I: IsoProfile, grid: Grid | None = None) -> np.ndarray:
    """``t sup_{s in [t,1]} phi_Y(s/2)/s int_{s/2}^s dtau/I(tau)`` at the nodes."""
    phi = _as_fundamental(phi_Y)
    grid = grid or phi.grid
    s = grid.nodes
    g = _phi_at(phi, s / 2.0) / s * I.inv_integral(s / 2.0, s)
    return s * kernels.suffix_max(np.ascontiguousarray(g))


def thm31_phi(phi_Y, I: IsoProfile, grid: Grid | None = None) -> FundamentalFn:
    """Fundamental function of the space induced by ``phi_Y`` and ``I``.

    The supremum over ``s in (t, 1)`` runs over the grid nodes and the
    endpoint ``s = t``.

    Raises
    ------
    PreconditionError
        If ``phi_Y(0+) > 0``.
    """
    phi = _as_fundamental(phi_Y)
    if not _check_vanishing(phi):
        raise PreconditionError(f"phi_Y(0+) = {phi.at0:g} > 0; the fundamental function of Y must vanish at 0")
    grid = grid or phi.grid
    vals = thm31_lower(phi, I, grid)
    return FundamentalFn(GridFn(grid, vals), grid, at0=0.0, label=f"phi_X from {phi.label}")


def thm31_upper(phi_Y, I: IsoProfile, grid: Grid | None = None) -> np.ndarray:
    """``int_0^t sup_{tau in (s,1)} phi_Y(tau)/I(tau) ds`` at the nodes.

    The running supremum is taken over nodes and integrated with the
    trapezoid rule; below ``t_min`` the supremum is either the value at
    ``t_min`` (when the ratio increases there) or the ratio itself, whose
    integral is computed exactly for power-log ``phi_Y``.
    """
    phi = _as_fundamental(phi_Y)
    grid = grid or phi.grid
    t = grid.nodes
    r = _phi_at(phi, t) / I(t)
    S = kernels.suffix_max(np.ascontiguousarray(r))
    body = np.concatenate([[0.0], np.cumsum(0.5 * (S[:-1] + S[1:]) * np.diff(t))])
    t0 = t[0]
    tail = S[0] * t0
    if isinstance(phi.phi, PowLogFn) and S[0] == r[0]:
        exact = sum(c * quad_powlog(a - I.alpha, b, 0.0, t0) for c, a, b in phi.phi.atoms)
        tail = max(tail, exact)
    return tail + body


_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


def _gap(y, t, B, k):
    """``(B**k - (a + y)**k)/k`` with ``B = a + t``, free of cancellation."""
    with np.errstate(divide="ignore"):
        return -(B**k) * np.expm1(k * np.log1p((y - t) / B)) / k


def _interval_primitive(x, y, a, t, k):
    """``int_0^x g`` for ``g(tau) = (B**k - max(tau, a)**k)/k`` on ``(0, a + t)``.

    ``y = clip(x - a, 0, t)`` is passed separately so that the width ``t``
    is never recovered from a difference of nearly equal numbers.
    """
    B = a + t
    Jk = float(_gap(0.0, t, B, k))
    half = 0.5 * np.asarray(y, dtype=float)
    pts = half[:, None] * (1.0 + _GL_X[None, :])
    body = half * np.sum(_GL_W[None, :] * _gap(pts, t, B, k), axis=1)
    x = np.asarray(x, dtype=float)
    return np.where(x <= a, x * Jk, a * Jk + body)


def phi_X_rearranged(phi_Y, I: IsoProfile, grid: Grid | None = None, stride: int = 16, n_shift: int = 24) -> tuple[np.ndarray, np.ndarray]:
    """Direct estimate of the fundamental function of the induced space.

    For ``h = chi_(a, a+t)`` (a rearrangement of ``chi_(0,t)``) the function
    ``tau -> int_tau^1 h/I`` is measured in ``M_{phi_Y}``; the maximum over
    shifts ``a`` (zero, a log-spaced set and ``1 - t``) bounds the true
    fundamental function from below.  Evaluated at every ``stride``-th
    node.

    Returns
    -------
    (t, values)
    """
    phi = _as_fundamental(phi_Y)
    grid = grid or phi.grid
    k = 1.0 - I.alpha
    nodes = grid.nodes
    ts = nodes[::-1][::stride][::-1]
    ph_nodes = _phi_at(phi, nodes)
    out = np.empty(ts.size)
    for j, t in enumerate(ts):
        shifts = np.array([0.0])
        if t < 1.0:
            shifts = np.concatenate([[0.0, 1.0 - t], np.geomspace(max(t * 1e-3, nodes[0]), 1.0 - t, n_shift)])
            shifts = shifts[(shifts >= 0) & (shifts <= 1.0 - t)]
        best = 0.0
        for a in shifts:
            inner = nodes[(nodes > a) & (nodes < a + t)]
            x = np.concatenate([nodes[nodes <= a], [a] if a > 0 else [], inner, [a + t], nodes[nodes >= a + t]])
            y = np.concatenate([np.zeros(int(np.sum(nodes <= a)) + (1 if a > 0 else 0)), inner - a, [t], np.full(int(np.sum(nodes >= a + t)), t)])
            ph = _phi_at(phi, x)
            val = float(np.max(ph * _interval_primitive(x, y, a, t, k) / x))
            best = max(best, val)
        out[j] = best
    return ts, out


@dataclass
class SandwichReport:
    """Two-sided bounds around the fundamental function of the induced space.

    ``phi_X`` is the node-wise value of the closed formula; ``direct`` is
    the independent estimate from ``phi_X_rearranged`` at the nodes
    ``t_direct``.
    """

    t: np.ndarray
    lower: np.ndarray
    phi_X: np.ndarray
    upper: np.ndarray
    t_direct: np.ndarray
    direct: np.ndarray

    def _upper_at_direct(self) -> np.ndarray:
        return np.interp(self.t_direct, self.t, self.upper)

    @property
    def holds(self) -> bool:
        slack = 1e-9
        ok = np.all(self.lower <= self.phi_X * (1 + slack)) and np.all(self.phi_X <= self.upper * (1 + slack))
        return bool(ok and np.all(self.direct <= self._upper_at_direct() * (1 + slack)))

    def to_dict(self) -> dict:
        lower_d = np.interp(self.t_direct, self.t, self.lower)
        return {
            "holds": self.holds,
            "max_phi_over_upper": float(np.max(self.phi_X / self.upper)),
            "max_upper_over_lower": float(np.max(self.upper / self.lower)),
            "direct_over_lower": [float(np.min(self.direct / lower_d)), float(np.max(self.direct / lower_d))],
            "max_direct_over_upper": float(np.max(self.direct / self._upper_at_direct())),
        }


def thm31_sandwich(phi_Y, I: IsoProfile, grid: Grid | None = None, stride: int = 16) -> SandwichReport:
    """Lower bound, formula value, upper bound and a direct estimate."""
    phi = _as_fundamental(phi_Y)
    grid = grid or phi.grid
    lower = thm31_lower(phi, I, grid)
    td, direct = phi_X_rearranged(phi, I, grid, stride=stride)
    return SandwichReport(grid.nodes, lower, lower.copy(), thm31_upper(phi, I, grid), td, direct)


def cond32_check(phi_Y, I: IsoProfile, refinements: Sequence[float] = REFINEMENTS, points_per_decade: int | None = None) -> dict:
    """Ratio of the upper to the lower bound, across refinements.

    The hypothesis of the two-sided estimate holds when this ratio stays
    bounded; a fundamental function that does not vanish at 0 is reported
    without evaluating the ratio.
    """
    phi = _as_fundamental(phi_Y)
    if not _check_vanishing(phi):
        return {
            "holds": False,
            "precondition_failed": True,
            "reason": f"phi_Y(0+) = {phi.at0:g} > 0",
            "max_ratio": math.nan,
            "max_ratio_trend": [],
        }
    ppd = points_per_decade or grid_from_env()[1]
    trend = []
    for t_min in refinements:
        g = make_log_grid(t_min, ppd)
        ratio = thm31_upper(phi, I, g) / thm31_lower(phi, I, g)
        trend.append(float(np.max(ratio)))
    verdict = classify(trend, refinements)
    return {
        "holds": verdict == "bounded",
        "precondition_failed": False,
        "max_ratio": trend[-1],
        "max_ratio_trend": trend,
        "verdict": verdict,
    }


def same_level_constant(phi1, phi2, grid: Grid | None = None) -> float:
    """Smallest ``C`` with ``phi1/phi2`` in ``[1/C, C]`` at every node."""
    f1, f2 = _as_fundamental(phi1), _as_fundamental(phi2)
    grid = grid or f1.grid
    r = _phi_at(f1, grid.nodes) / _phi_at(f2, grid.nodes)
    return float(max(np.max(r), 1.0 / np.min(r)))


# --------------------------------------------------------------------------
# psi and its min-form


@dataclass
class PsiResult:
    t: np.ndarray
    sup_form: np.ndarray
    min_form: np.ndarray

    @property
    def max_gap(self) -> float:
        return float(np.max(np.abs(self.sup_form - self.min_form) / np.maximum(np.abs(self.sup_form), 1e-300)))


def psi(alpha: float, phi_Y, t=None, grid: Grid | None = None) -> PsiResult:
    """``psi(t) = t sup_{s in [t,1]} phi_Y(s/2) s**-alpha`` in two ways.

    The supremum form scans ``s >= t``; the min-form takes
    ``sup_s phi_Y(s/2) min(t**(1-alpha), t s**-alpha)`` over every ``s``.
    Both use the same candidate set: the grid nodes together with the
    evaluation points ``t``.
    """
    if not (0.0 < alpha < 1.0):
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    phi = _as_fundamental(phi_Y)
    grid = grid or phi.grid
    tt = grid.nodes if t is None else np.asarray(t, dtype=float)
    s = np.unique(np.concatenate([grid.nodes, tt]))
    vals = _phi_at(phi, s / 2.0)
    h = vals * s ** (-alpha)
    sm = kernels.suffix_max(np.ascontiguousarray(h))
    idx = np.searchsorted(s, tt)
    sup_form = tt * sm[idx]
    min_form = kernels.minform_sup(np.ascontiguousarray(vals), np.ascontiguousarray(s), np.ascontiguousarray(tt), float(alpha))
    return PsiResult(tt, sup_form, np.asarray(min_form))


def psi_function(alpha: float, phi_Y, grid: Grid | None = None) -> FundamentalFn:
    phi = _as_fundamental(phi_Y)
    grid = grid or phi.grid
    res = psi(alpha, phi, grid=grid)
    return FundamentalFn(GridFn(grid, res.sup_form), grid, at0=0.0, check=False, label=f"psi from {phi.label}")


def geometric_sum_check(alpha: float, phi_Y, sigma: float = 0.5, grid: Grid | None = None) -> dict:
    """Check ``psi(t) >= K int_0^t psi(s)/s ds`` with ``K = (1 - sigma**(1-alpha))/log(1/sigma)``.

    The integral uses the exact cell weights of the linear-in-u
    interpolant of ``psi``; below ``t_min`` it is ``int_0^t0 s**-alpha
    phi_Y(s/2) ds`` in closed form when that is what ``psi`` equals there
    and ``psi(t0)/e`` with the local log-log exponent ``e`` otherwise.
    """
    phi = _as_fundamental(phi_Y)
    grid = grid or phi.grid
    t = grid.nodes
    p = psi(alpha, phi, grid=grid).sup_form
    K = (1.0 - sigma ** (1.0 - alpha)) / math.log(1.0 / sigma)
    wl, wr = grid.cell_moments(0.0)
    cells = p[:-1] * wl + p[1:] * wr
    t0 = t[0]
    attained_at_t0 = math.isclose(p[0], t0 * float(_phi_at(phi, t0 / 2.0)) * t0 ** (-alpha), rel_tol=1e-12)
    if isinstance(phi.phi, PowLogFn) and attained_at_t0:
        scale = 2.0 ** (1.0 - alpha)
        tail = scale * sum(c * quad_powlog(a - alpha, b, 0.0, t0 / 2.0) for c, a, b in phi.phi.atoms)
    else:
        e = math.log(p[1] / p[0]) / math.log(t[1] / t0)
        tail = p[0] / e if e > 0 else math.inf
    integral = tail + np.concatenate([[0.0], np.cumsum(cells)])
    ratio = p / (K * integral)
    return {
        "K": K,
        "sigma": sigma,
        "min_ratio": float(np.min(ratio)),
        "holds": bool(np.all(p >= K * integral * (1 - 1e-12))),
    }
