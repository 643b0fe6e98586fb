"""Distribution function, non-increasing rearrangement and f**.

Rearrangement is exact on step functions: values are sorted in
decreasing order and laid out with their cell measures as widths.  A
``GridFn`` is read as the step function equal to each sample on its
dual cell, so sampled data inherit the same exactness.

The module also holds the two profile engines used by every norm:
``StepProfile`` (exact sums over the pieces of f*) and ``SmoothProfile``
(a non-increasing ``PowLogFn`` handled by quadrature in ``u`` with
symbolic divergence checks near zero).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy import integrate as _spi
from scipy import optimize as _spo

from .errors import ShapeError
from .funcrep import (
    LOG2,
    Function,
    Grid,
    GridFn,
    PowLogFn,
    StepFn,
    default_grid,
    powlog_cells,
    quad_powlog,
)

_TOL = 1e-12


def _exps_converge(ea: float, eb: float) -> bool:
    """Does ``int_0 t**ea * log(2/t)**eb dt`` converge?"""
    if ea > -1.0 + _TOL:
        return True
    if abs(ea + 1.0) <= _TOL:
        return eb < -1.0 - _TOL
    return False


def _exps_bounded(ea: float, eb: float) -> bool:
    """Is ``t**ea * log(2/t)**eb`` bounded near zero?"""
    if ea > _TOL:
        return True
    if abs(ea) <= _TOL:
        return eb <= _TOL
    return False


# --------------------------------------------------------------------------
# result types


@dataclass(frozen=True, eq=False)
class Distribution:
    """``f_*(s) = |{|f| > s}|`` as a right-continuous step function.

    ``levels`` are the distinct values of ``|f|`` in decreasing order and
    ``mass[i] = f_*(s)`` for ``s`` in ``[levels[i+1], levels[i])``.
    """

    levels: np.ndarray
    mass: np.ndarray

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        k = np.searchsorted(-self.levels, -s, side="left")
        out = np.where(k > 0, self.mass[np.maximum(k - 1, 0)], 0.0)
        return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class RearrangedFn:
    """f*, f** and f_* of one function.

    Attributes
    ----------
    star : GridFn
        f* at the grid nodes.
    distribution : Distribution
        The distribution function over the value grid of ``|f|``.
    maximal : GridFn
        f** at the grid nodes.
    steps : StepFn
        Exact f* when the input is a step function (for a smooth
        ``PowLogFn`` this is the step function of its samples).
    """

    star: GridFn
    distribution: Distribution
    maximal: GridFn
    steps: StepFn


# --------------------------------------------------------------------------
# step rearrangement


def sorted_steps(f: StepFn) -> StepFn:
    """Exact f* of a step function (ties broken by cell order)."""
    v = np.abs(f.values)
    m = f.measures
    order = np.argsort(-v, kind="stable")
    vs = v[order]
    ms = m[order]
    b = np.concatenate([[0.0], np.cumsum(ms)])
    b[-1] = 1.0
    return StepFn(b, vs)


def _distribution(star: StepFn) -> Distribution:
    v = star.values
    cum = star.breaks[1:]
    # collapse equal values: keep the last cumulative mass of each run
    last = np.concatenate([v[1:] != v[:-1], [True]])
    return Distribution(v[last].copy(), cum[last].copy())


def _step_primitive(star: StepFn, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    b = star.breaks
    v = star.values
    with np.errstate(invalid="ignore"):
        cum = np.concatenate([[0.0], np.cumsum(v * np.diff(b))])
    k = np.clip(np.searchsorted(b, t, side="right") - 1, 0, v.size - 1)
    with np.errstate(invalid="ignore"):
        return cum[k] + np.where(t > b[k], v[k] * (t - b[k]), 0.0)


def rearrangement(f: Function, grid: Grid | None = None) -> RearrangedFn:
    """Non-increasing rearrangement with f** and the distribution.

    Parameters
    ----------
    f : GridFn, StepFn or PowLogFn
        Input.  A ``GridFn`` is rearranged as the step function of its
        samples on the dual cells of its grid.  A ``PowLogFn`` that is
        non-negative and non-increasing is its own rearrangement; any
        other ``PowLogFn`` is sampled to the grid first.
    grid : Grid, optional
        Grid for the sampled outputs (defaults to the input's grid or
        the default grid).
    """
    if isinstance(f, GridFn):
        grid = grid or f.grid
        star_steps = sorted_steps(f.to_stepfn())
    elif isinstance(f, StepFn):
        grid = grid or default_grid()
        star_steps = sorted_steps(f)
    elif isinstance(f, PowLogFn):
        grid = grid or default_grid()
        if f.is_nonincreasing(grid) and f.is_nonnegative(grid):
            star = GridFn(grid, f(grid.nodes))
            prof = SmoothProfile(f)
            maximal = GridFn(grid, prof.primitive(grid.nodes) / grid.nodes)
            steps = sorted_steps(star.to_stepfn())
            return RearrangedFn(star, _distribution(steps), maximal, steps)
        return rearrangement(GridFn(grid, f(grid.nodes)), grid)
    else:
        raise TypeError(f"cannot rearrange {type(f).__name__}")
    t = grid.nodes
    star = GridFn(grid, star_steps(t))
    maximal = GridFn(grid, _step_primitive(star_steps, t) / t)
    return RearrangedFn(star, _distribution(star_steps), maximal, star_steps)


def star_stepfn(f: Function) -> StepFn:
    """Exact f* as a step function for step-type inputs."""
    if isinstance(f, GridFn):
        return sorted_steps(f.to_stepfn())
    if isinstance(f, StepFn):
        return sorted_steps(f)
    raise TypeError(f"{type(f).__name__} is not a step-type function")


# --------------------------------------------------------------------------
# classical inequalities


def _as_steps(f: Function) -> StepFn:
    if isinstance(f, GridFn):
        return f.to_stepfn()
    if isinstance(f, StepFn):
        return f
    raise TypeError(f"expected GridFn or StepFn, got {type(f).__name__}")


def _check_same_grid(f, g) -> None:
    if isinstance(f, GridFn) and isinstance(g, GridFn) and f.grid is not g.grid:
        if f.grid.size != g.grid.size or not np.array_equal(f.grid.nodes, g.grid.nodes):
            raise ShapeError("functions live on different grids")
    if isinstance(f, GridFn) != isinstance(g, GridFn):
        raise ShapeError("cannot mix a GridFn with a StepFn")


def _product_integral(f: StepFn, g: StepFn) -> float:
    b = np.union1d(f.breaks, g.breaks)
    mid = (b[:-1] + b[1:]) / 2.0
    with np.errstate(invalid="ignore"):
        prod = np.abs(f(mid) * g(mid))
    prod = np.where(np.isnan(prod), 0.0, prod)
    return float(np.sum(prod * np.diff(b)))


def check_hl_inequality(f: Function, g: Function) -> dict:
    """Hardy-Littlewood: ``int |f g| <= int f* g*``.

    Returns ``{"lhs", "rhs", "holds"}`` with a relative slack of 1e-9.
    """
    _check_same_grid(f, g)
    fs, gs = _as_steps(f), _as_steps(g)
    lhs = _product_integral(fs, gs)
    rhs = _product_integral(sorted_steps(fs), sorted_steps(gs))
    return {"lhs": lhs, "rhs": rhs, "holds": bool(lhs <= rhs * (1.0 + 1e-9) + 1e-300)}


def hlp_dominates(g1: Function, g2: Function) -> bool:
    """``int_0^t g1* <= int_0^t g2*`` at every node (and breakpoint)."""
    _check_same_grid(g1, g2)
    s1, s2 = sorted_steps(_as_steps(g1)), sorted_steps(_as_steps(g2))
    pts = np.union1d(s1.breaks, s2.breaks)
    if isinstance(g1, GridFn):
        pts = np.union1d(pts, g1.grid.nodes)
    p1 = _step_primitive(s1, pts)
    p2 = _step_primitive(s2, pts)
    return bool(np.all(p1 <= p2 + 1e-12))


# --------------------------------------------------------------------------
# profile engines


class StepProfile:
    """f* given as a non-increasing step function; all functionals exact."""

    kind = "step"

    def __init__(self, star: StepFn):
        v = np.asarray(star.values, dtype=float)
        b = np.asarray(star.breaks, dtype=float)
        pos = v > 0
        k = int(np.count_nonzero(pos))
        self.v = v[:k]
        self.c = b[: k + 1]
        self.support = float(self.c[-1]) if k else 0.0
        with np.errstate(invalid="ignore"):
            self.cum = np.concatenate([[0.0], np.cumsum(self.v * np.diff(self.c))])

    @property
    def empty(self) -> bool:
        return self.v.size == 0

    def ess_sup(self) -> float:
        return float(self.v[0]) if self.v.size else 0.0

    def primitive(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.empty:
            return np.zeros(t.shape)
        k = np.clip(np.searchsorted(self.c, t, side="right") - 1, 0, self.v.size - 1)
        with np.errstate(invalid="ignore"):
            inside = np.minimum(t, self.c[k + 1]) - self.c[k]
            return np.where(t >= self.support, self.cum[-1], self.cum[k] + self.v[k] * np.maximum(inside, 0.0))

    def weighted_integral(self, q: float, a: float, b: float) -> float:
        """``int t**a log(2/t)**b f*(t)**q dt``."""
        if self.empty:
            return 0.0
        first = quad_powlog(a, b, 0.0, self.c[1])
        rest = powlog_cells(a, b, self.c[1:-1], self.c[2:]) if self.v.size > 1 else np.zeros(0)
        seg = np.concatenate([[first], rest])
        with np.errstate(invalid="ignore", over="ignore"):
            terms = self.v**q * seg
        terms = np.where(np.isnan(terms), np.inf, terms)
        return float(np.sum(terms))

    def weighted_sup(self, a: float, b: float) -> float:
        """``sup_t t**a log(2/t)**b f*(t)``."""
        if self.empty:
            return 0.0
        w = lambda t: np.asarray(t, dtype=float) ** a * np.log(2.0 / np.asarray(t, dtype=float)) ** b
        if not _exps_bounded(a, b):
            return math.inf
        # value of the weight at 0+
        w0 = 0.0 if a > 0 or b < 0 else 1.0
        lo = self.c[:-1].copy()
        hi = self.c[1:]
        lo[0] = hi[0]  # first piece handled with w0 below
        best_w = np.maximum(w(lo), w(hi))
        if a != 0.0 and b / a > LOG2:
            ts = 2.0 * math.exp(-b / a)
            inside = (ts > self.c[:-1]) & (ts < hi)
            best_w = np.where(inside, np.maximum(best_w, w(ts)), best_w)
        best_w[0] = max(best_w[0], w0)
        with np.errstate(invalid="ignore"):
            return float(np.max(self.v * best_w))

    def young_integral(self, A, lam: float) -> float:
        if self.empty:
            return 0.0
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            vals = A(self.v / lam)
        return float(np.sum(vals * np.diff(self.c)))

    def stieltjes(self, majorant) -> float:
        """``int f* d(phi_bar)`` including the jump ``phi_bar(0+) f*(0+)``."""
        if self.empty:
            return 0.0
        pb = np.asarray(majorant(self.c[1:]), dtype=float)
        pb_prev = np.concatenate([[0.0], pb[:-1]])
        with np.errstate(invalid="ignore"):
            return float(np.sum(self.v * (pb - pb_prev)))

    def maximal_sup(self, phi: Callable, extra=None) -> float:
        """``sup_t phi(t) f**(t)`` over (0, 1]."""
        if self.empty:
            return 0.0
        cand = [self.c[1:], [1.0]]
        if extra is not None:
            cand.append(np.asarray(extra, dtype=float))
        t = np.unique(np.concatenate(cand))
        t = t[(t > 0) & (t <= 1)]
        f2 = lambda x: self.primitive(x) / x
        vals = np.asarray(phi(t), dtype=float) * f2(t)
        k = int(np.argmax(vals))
        best = float(vals[k])
        for j in _top_indices(vals, 3):
            lo = t[j - 1] if j > 0 else t[j] * 1e-3
            hi = t[j + 1] if j + 1 < t.size else t[j]
            if hi <= lo:
                continue
            best = max(best, _polish_max(lambda x: float(phi(x)) * float(f2(x)), lo, hi))
        return best


def _top_indices(vals: np.ndarray, k: int) -> list[int]:
    order = np.argsort(-vals, kind="stable")
    return [int(i) for i in order[:k]]


def _polish_max(fun: Callable[[float], float], lo: float, hi: float) -> float:
    """Bounded Brent search in ``u = log(2/t)`` between ``lo`` and ``hi``."""
    ua, ub = math.log(2.0 / hi), math.log(2.0 / lo)
    res = _spo.minimize_scalar(
        lambda u: -fun(2.0 * math.exp(-u)), bounds=(ua, ub), method="bounded",
        options={"xatol": 1e-11 * max(1.0, ua)},
    )
    return float(-res.fun) if np.isfinite(res.fun) else -math.inf


def _u_panels(u0: float) -> list[float]:
    edges = [u0]
    step = 1.0
    for _ in range(7):
        edges.append(edges[-1] + step)
        step *= 4.0
    edges.append(math.inf)
    return edges


def _quad_u(logint: Callable[[float], float], u0: float) -> float:
    """``int_{u0}^inf exp(logint(u)) du`` over a fixed panel ladder."""
    def fun(u):
        v = logint(u)
        if v != v:
            return 0.0
        return math.exp(v) if v < 709.0 else math.inf

    total = 0.0
    edges = _u_panels(u0)
    for a, b in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", _spi.IntegrationWarning)
            val, _ = _spi.quad(fun, a, b, epsabs=0.0, epsrel=1e-12, limit=400)
        total += val
    return total


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_OFFSETS = np.unique(np.concatenate([[0.0], np.geomspace(1e-10, 1.0, 31), np.arange(2.0, 41.0), np.geomspace(40.0, 760.0, 25)]))


def _gl_u(logint_vec: Callable[[np.ndarray], np.ndarray], u0: float, breaks=()) -> float:
    """``int_{u0}^inf exp(logint(u)) du`` for integrands bounded by ``C exp(-u)``.

    Composite 16-point Gauss-Legendre on panels graded towards ``u0`` and
    towards every point of ``breaks`` (kinks of the integrand).
    """
    edges = u0 + _GL_OFFSETS
    for b in breaks:
        if u0 < b < edges[-1]:
            edges = np.concatenate([edges, b + _GL_OFFSETS[1:32], b - _GL_OFFSETS[1:32]])
    edges = np.unique(edges[edges >= u0])
    lo = edges[:-1]
    hi = edges[1:]
    half = 0.5 * (hi - lo)
    x = (0.5 * (hi + lo))[:, None] + half[:, None] * _GL_X[None, :]
    with np.errstate(all="ignore"):
        v = np.exp(np.asarray(logint_vec(x.ravel()), dtype=float)).reshape(x.shape)
    v = np.where(np.isnan(v), 0.0, v)
    return float(np.sum(half * (v @ _GL_W)))


class SmoothProfile:
    """f* given by a non-negative, non-increasing ``PowLogFn``."""

    kind = "smooth"

    def __init__(self, f: PowLogFn):
        self.f = f
        self.support = f.support
        self.u0 = math.log(2.0 / f.support)
        self.f0 = f.limit0()
        if math.isinf(self.f0):
            _, ga, gb = f.leading()
            self.growth = (ga, gb)
        else:
            self.growth = (0.0, 0.0)

    @property
    def empty(self) -> bool:
        return not self.f.atoms

    def logf(self, u: float) -> float:
        with np.errstate(all="ignore"):
            val = float(self.f.log_at_u(np.asarray(u)))
        return val if not math.isnan(val) else -math.inf

    def ess_sup(self) -> float:
        return float(self.f0)

    def primitive(self, t) -> np.ndarray:
        """``int_0^min(t, s) f``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        x = np.minimum(t, self.support)
        order = np.argsort(x)
        xs = x[order]
        out = np.zeros(xs.size)
        if xs.size:
            for c, a, b in self.f.atoms:
                head = quad_powlog(a, b, 0.0, xs[0]) if xs[0] > 0 else 0.0
                inc = powlog_cells(a, b, xs[:-1], xs[1:]) if xs.size > 1 else np.zeros(0)
                inc = np.where(xs[1:] > xs[:-1], inc, 0.0) if xs.size > 1 else inc
                out += c * np.concatenate([[head], head + np.cumsum(inc)])
        res = np.empty_like(out)
        res[order] = out
        return res

    def _scalar_primitive(self, t: float) -> float:
        x = min(t, self.support)
        return float(sum(c * quad_powlog(a, b, 0.0, x) for c, a, b in self.f.atoms))

    def weighted_integral(self, q: float, a: float, b: float) -> float:
        if self.empty:
            return 0.0
        ga, gb = self.growth
        if not _exps_converge(a + q * ga, b + q * gb):
            return math.inf
        logw = lambda u: (a + 1.0) * (LOG2 - u) + b * math.log(u)
        return _quad_u(lambda u: logw(u) + q * self.logf(u), self.u0)

    def weighted_sup(self, a: float, b: float) -> float:
        if self.empty:
            return 0.0
        ga, gb = self.growth
        if not _exps_bounded(a + ga, b + gb):
            return math.inf
        h = self.f * PowLogFn([(1.0, a, b)])
        return _powlog_sup_all(h)

    def young_integral(self, A, lam: float) -> float:
        if self.empty:
            return 0.0
        if not A.integral_finite(self.f, lam):
            return math.inf
        loglam = math.log(lam)
        if math.isfinite(self.f0):
            def logint(u):
                lf = np.asarray(self.f.log_at_u(u), dtype=float)
                lf = np.where(np.isnan(lf), -np.inf, lf)
                return np.asarray(A.log_eval(lf - loglam), dtype=float) + LOG2 - u

            return _gl_u(logint, self.u0, self._crossings(A.meta.get("kinks", ()), loglam))
        return _quad_u(lambda u: A.log_eval(self.logf(u) - loglam) + LOG2 - u, self.u0)

    def _crossings(self, kinks, loglam: float) -> list:
        """Points ``u`` where ``log f(u) - loglam`` meets a kink of ``A``."""
        out = []
        u = self.u0 + _GL_OFFSETS[1:]
        lf = np.asarray(self.f.log_at_u(u), dtype=float) - loglam
        lf = np.where(np.isnan(lf), -np.inf, lf)
        for k in kinks:
            d = lf - k
            idx = np.nonzero(np.sign(d[:-1]) != np.sign(d[1:]))[0]
            for i in idx:
                if np.isfinite(d[i]) and np.isfinite(d[i + 1]):
                    g = lambda x: float(self.f.log_at_u(np.asarray(x))) - loglam - k
                    out.append(_spo.brentq(g, u[i], u[i + 1], xtol=1e-14))
                else:
                    out.append(float(u[i + 1]))
        return out

    def stieltjes(self, majorant) -> float:
        if self.empty:
            return 0.0
        exact = getattr(majorant, "exact", None)
        jump = majorant.at0 * self.f0 if majorant.at0 > 0 else 0.0
        if exact is not None:
            dphi = exact.derivative()
            h = self.f * dphi
            body = _powlog_integral0(h, self.support)
            return float(body + jump)
        xs, ys = majorant.vertices
        slopes = np.diff(ys) / np.diff(xs)
        P = self.primitive(xs)
        if np.any(np.isinf(P)) and np.any(slopes[np.isinf(P[1:])] > 0):
            return math.inf
        with np.errstate(invalid="ignore"):
            body = float(np.nansum(slopes * np.diff(P)))
        return body + jump

    def maximal_sup(self, phi: Callable, extra=None) -> float:
        if self.empty:
            return 0.0
        ga, gb = self.growth
        if not _exps_converge(ga, gb):
            return math.inf
        base = default_grid().nodes
        deep = np.geomspace(1e-300, base[0], 400)
        t = np.unique(np.concatenate([deep, base, [self.support, 1.0]]))
        vals = np.asarray(phi(t), dtype=float) * self.primitive(t) / t
        k = int(np.argmax(vals))
        best = float(vals[k])
        for j in _top_indices(vals, 3):
            lo = t[j - 1] if j > 0 else t[j] * 1e-3
            hi = t[j + 1] if j + 1 < t.size else t[j]
            if hi > lo:
                best = max(best, _polish_max(lambda x: float(phi(x)) * self._scalar_primitive(x) / x, lo, hi))
        return best


def _powlog_integral0(h: PowLogFn, s: float) -> float:
    """``int_0^s h`` with a divergence check on the leading atom."""
    if not h.atoms:
        return 0.0
    c, a, b = h.leading()
    if not _exps_converge(a, b):
        return math.inf if c > 0 else -math.inf
    return float(sum(ci * quad_powlog(ai, bi, 0.0, s) for ci, ai, bi in h.atoms))


def _powlog_sup_all(h: PowLogFn) -> float:
    """``sup`` of a bounded-near-zero ``PowLogFn`` over ``(0, support]``."""
    s = h.support
    u0 = math.log(2.0 / s)
    u = np.unique(np.concatenate([u0 + np.geomspace(1e-9, 1e5, 3000), [u0]]))
    with np.errstate(all="ignore"):
        logs = h.log_at_u(u)
    logs = np.where(np.isnan(logs), -np.inf, logs)
    k = int(np.argmax(logs))
    best = float(np.exp(logs[k]))
    lo = u[max(k - 1, 0)]
    hi = u[min(k + 1, u.size - 1)]
    if hi > lo:
        res = _spo.minimize_scalar(
            lambda x: -float(np.exp(h.log_at_u(np.asarray(x)))), bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-12 * max(1.0, lo)},
        )
        if np.isfinite(res.fun):
            best = max(best, float(-res.fun))
    best = max(best, h.limit0() if math.isfinite(h.limit0()) else best)
    return best


Profile = Union[StepProfile, SmoothProfile]


def profile_of(f: Function, grid: Grid | None = None) -> Profile:
    """Pick the profile engine for ``f``.

    Step-type inputs give an exact ``StepProfile``.  A non-negative,
    non-increasing ``PowLogFn`` gives a ``SmoothProfile``; other
    ``PowLogFn`` inputs are sampled to the grid first.
    """
    if isinstance(f, (GridFn, StepFn)):
        return StepProfile(star_stepfn(f))
    if isinstance(f, PowLogFn):
        if f.is_nonincreasing(grid) and f.is_nonnegative(grid):
            return SmoothProfile(f)
        grid = grid or default_grid()
        return StepProfile(star_stepfn(GridFn(grid, np.abs(f(grid.nodes)))))
    raise TypeError(f"unsupported function type {type(f).__name__}")
