"""One-dimensional operators and empirical operator-norm estimates.

``copson`` is the kernel operator ``f -> int_t^1 f(s) s**(c-1) ds`` with
``c = m(1 - alpha)``; ``sup_op`` is ``T_gamma``; ``dilate`` is ``E_lambda``.
Operator norms are estimated as the largest ratio over a test family,
recomputed on grids with smaller ``t_min`` to tell bounded from divergent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import kernels
from .errors import DomainError, ParameterError, SpecError
from .funcrep import (
    DEFAULT_PPD,
    Function,
    Grid,
    GridFn,
    PowLogFn,
    StepFn,
    default_grid,
    grid_from_env,
    make_log_grid,
    powlog_cells,
    quad_powlog,
)
from .rearrange import star_stepfn
from .spaces import SpaceSpec, norm, validate_spec
from .trend import REFINEMENTS, classify

_TOL = 1e-12


# --------------------------------------------------------------------------
# Copson operator


@dataclass(frozen=True)
class CopsonOp:
    """``f -> int_t^1 f(s) s**(-1 + m(1-alpha)) ds``.

    Parameters
    ----------
    m : int
        Order of the derivatives.
    alpha : float
        Isoperimetric exponent, ``1 - 1/n <= alpha < 1``.
    n : int, optional
        Ambient dimension; defaults to 2, the smallest admissible one.
    """

    m: int
    alpha: float
    n: int = 2

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ParameterError(f"m must be a positive integer, got {self.m}")
        if int(self.n) != self.n or self.n < 2:
            raise ParameterError(f"n must be an integer >= 2, got {self.n}")
        if not (1.0 - 1.0 / self.n - _TOL <= self.alpha < 1.0):
            raise ParameterError(f"alpha must lie in [1 - 1/n, 1) = [{1 - 1 / self.n:g}, 1), got {self.alpha}")
        if not self.c < 1.0:
            raise ParameterError(f"m(1 - alpha) = {self.c:g} must be < 1")

    @property
    def c(self) -> float:
        return self.m * (1.0 - self.alpha)

    @property
    def kernel_exp(self) -> float:
        return -1.0 + self.c

    def apply(self, f: Function, grid: Grid | None = None):
        return copson(self, f, grid)

    def describe(self) -> str:
        return f"copson(m={self.m}, alpha={self.alpha:g})"


def copson(op: CopsonOp, f: Function, grid: Grid | None = None):
    """Apply the Copson operator.

    A ``PowLogFn`` whose atoms all have a closed-form antiderivative
    (``a = -c`` with ``b != -1``, or ``b = 0`` with ``a != -c``) gives a
    ``PowLogFn``.  Other ``PowLogFn`` inputs give a ``GridFn`` computed from
    exact cell integrals; ``GridFn`` inputs use the cell moments of the
    linear-in-u interpolant; ``StepFn`` inputs are integrated exactly and
    returned as a ``GridFn`` on ``grid``.
    """
    c = op.c
    if isinstance(f, PowLogFn):
        g = grid or default_grid()
        if not f.is_nonnegative(g):
            raise DomainError("copson needs a non-negative input")
        sym = _copson_symbolic(f, c)
        if sym is not None:
            return sym
        return GridFn(g, _copson_powlog_nodes(f, c, g.nodes))
    if isinstance(f, GridFn):
        v = f.values
        if np.any(v < 0):
            raise DomainError("copson needs a non-negative input")
        wl, wr = f.grid.cell_moments(c)
        with np.errstate(invalid="ignore"):
            cells = v[:-1] * wl + v[1:] * wr
        cells = np.where(np.isinf(v[:-1]) | np.isinf(v[1:]), math.inf, cells)
        out = np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]])
        return GridFn(f.grid, out)
    if isinstance(f, StepFn):
        if np.any(f.values < 0):
            raise DomainError("copson needs a non-negative input")
        g = grid or default_grid()
        return GridFn(g, _copson_step(f, c, g.nodes))
    raise TypeError(f"unsupported function type {type(f).__name__}")


def _copson_symbolic(f: PowLogFn, c: float) -> Optional[PowLogFn]:
    s = f.support
    Ls = math.log(2.0 / s)
    atoms = []
    const = 0.0
    for k, a, b in f.atoms:
        e = a + c - 1.0
        if abs(e + 1.0) <= _TOL:
            if abs(b + 1.0) <= _TOL:
                return None
            # int_t^s x^{-1} L^b = (L(t)^{b+1} - L(s)^{b+1})/(b+1)
            atoms.append((k / (b + 1.0), 0.0, b + 1.0))
            const -= k * Ls ** (b + 1.0) / (b + 1.0)
        elif b == 0.0:
            atoms.append((-k / (e + 1.0), e + 1.0, 0.0))
            const += k * s ** (e + 1.0) / (e + 1.0)
        else:
            return None
    if const != 0.0:
        atoms.append((const, 0.0, 0.0))
    return PowLogFn(atoms, support=s)


def _copson_powlog_nodes(f: PowLogFn, c: float, t: np.ndarray) -> np.ndarray:
    s = f.support
    x = np.minimum(t, s)
    out = np.zeros(t.size)
    for k, a, b in f.atoms:
        e = a + c - 1.0
        inc = powlog_cells(e, b, x[:-1], x[1:])
        inc = np.where(x[1:] > x[:-1], inc, 0.0)
        tail = quad_powlog(e, b, x[-1], s) if x[-1] < s else 0.0
        out += k * (np.concatenate([np.cumsum(inc[::-1])[::-1], [0.0]]) + tail)
    return out


def _copson_step(f: StepFn, c: float, t: np.ndarray) -> np.ndarray:
    b0, b1, v = f.breaks[:-1], f.breaks[1:], f.values
    nz = v != 0
    b0, b1, v = b0[nz], b1[nz], v[nz]
    lo = np.maximum(t[:, None], b0[None, :])
    seg = np.where(b1[None, :] > lo, (b1[None, :] ** c - lo**c) / c, 0.0)
    with np.errstate(invalid="ignore"):
        return np.nansum(seg * v[None, :], axis=1) if v.size else np.zeros(t.size)


# --------------------------------------------------------------------------
# T_gamma


@dataclass(frozen=True)
class SupOp:
    """``T_gamma g(t) = t**-gamma sup_{s in [t,1]} s**gamma g*(s)``."""

    gamma: float

    def __post_init__(self):
        if not (0.0 < self.gamma < 1.0):
            raise ParameterError(f"gamma must lie in (0, 1), got {self.gamma}")

    def apply(self, g: Function, grid: Grid | None = None) -> GridFn:
        return sup_op(self.gamma, g, grid)

    def describe(self) -> str:
        return f"T_gamma(gamma={self.gamma:g})"


def sup_op(gamma: float, g: Function, grid: Grid | None = None) -> GridFn:
    """``T_gamma g`` at the grid nodes.

    For step inputs (including ``GridFn`` through its dual cells) the
    supremum of the increasing ``s**gamma v_k`` over each piece is its
    right-end limit, so the result is exact.  A non-increasing ``PowLogFn``
    is sampled at the nodes and at the interior critical points of each
    atom of ``s**gamma g(s)``.
    """
    if not (0.0 < gamma < 1.0):
        raise ParameterError(f"gamma must lie in (0, 1), got {gamma}")
    if isinstance(g, GridFn):
        grid = g.grid
    grid = grid or default_grid()
    t = grid.nodes
    if isinstance(g, PowLogFn) and g.is_nonincreasing(grid) and g.is_nonnegative(grid):
        pts = [t]
        for _, a, b in g.atoms:
            ea = a + gamma
            if ea != 0.0 and b != 0.0 and b / ea > 0:
                ts = 2.0 * math.exp(-b / ea)
                if ts < g.support:
                    pts.append([ts])
        pts.append([g.support] if g.support < 1.0 else [])
        s = np.unique(np.concatenate([np.asarray(p, dtype=float) for p in pts]))
        h = s**gamma * np.asarray(g(s), dtype=float)
        if g.support < 1.0:
            # left limit at the end of the support
            h = np.where(s == g.support, g.support**gamma * float(g(g.support)), h)
        sm = kernels.suffix_max(np.ascontiguousarray(h, dtype=float))
        idx = np.searchsorted(s, t)
        return GridFn(grid, t ** (-gamma) * sm[idx])
    if isinstance(g, PowLogFn):
        # not monotone on the grid: sample, then treat as a step function
        g = g.sample(grid)
    star = star_stepfn(g)
    b1 = star.breaks[1:]
    piece = b1**gamma * star.values
    sm = kernels.suffix_max(np.ascontiguousarray(piece, dtype=float))
    k = np.clip(np.searchsorted(star.breaks, t, side="right") - 1, 0, star.values.size - 1)
    vals = np.where(t < 1.0, sm[k], piece[-1])
    return GridFn(grid, t ** (-gamma) * vals)


# --------------------------------------------------------------------------
# dilation


@dataclass(frozen=True)
class DilationOp:
    """``E_lambda f(t) = f(t / lambda)`` for ``t <= lambda``, else 0."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError(f"lambda must be positive, got {self.lam}")

    def apply(self, f: Function, grid: Grid | None = None):
        return dilate(self.lam, f, grid)

    def describe(self) -> str:
        return f"dilate(lambda={self.lam:g})"


def dilate(lam: float, f: Function, grid: Grid | None = None):
    """Dilation ``E_lambda``; exact for ``StepFn``, interpolated in ``u`` otherwise."""
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    if isinstance(f, StepFn):
        b = np.minimum(f.breaks * lam, 1.0)
        keep = np.concatenate([[True], np.diff(b) > 0])
        b2 = b[keep]
        v2 = f.values[keep[1:]]
        if b2[-1] < 1.0:
            b2 = np.concatenate([b2, [1.0]])
            v2 = np.concatenate([v2, [0.0]])
        return StepFn(b2, v2)
    if isinstance(f, GridFn):
        grid = f.grid
    grid = grid or default_grid()
    t = grid.nodes
    inside = t <= lam
    x = np.where(inside, t / lam, 1.0)
    vals = np.where(inside, np.asarray(f(x), dtype=float), 0.0)
    return GridFn(grid, vals)


# --------------------------------------------------------------------------
# operator norms


Operator = Union[CopsonOp, SupOp, DilationOp]


@dataclass
class OpNormReport:
    """Best ratio ``||op f||_target / ||f||_domain`` over a test family."""

    best_ratio: float
    attaining_function: str
    refinement_trend: list
    verdict: str
    operator: str = ""
    domain: str = ""
    target: str = ""
    certificate: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "operator": self.operator,
            "domain": self.domain,
            "target": self.target,
            "best_ratio": self.best_ratio,
            "attaining_function": self.attaining_function,
            "refinement_trend": [[t, r] for t, r in self.refinement_trend],
            "verdict": self.verdict,
            "certificate": self.certificate,
        }


Member = tuple  # (label, function or PowLogFn to be sampled)


def default_family(seed: int = 0, n_random: int = 100) -> list:
    """The default test family.

    Characteristic functions ``chi_(0, 10**-k)``, ``k = 1..10``; power-log
    atoms ``t**a log(2/t)**b`` on the lattice ``a in {-0.9, ..., 0}``,
    ``b in {-2, ..., 2}``; and random non-increasing step functions.
    Atoms are sampled on each grid so that their norms follow the
    refinement.
    """
    fam: list = []
    for k in range(1, 11):
        fam.append((f"chi_(0,1e-{k})", StepFn.indicator(0.0, 10.0**-k)))
    for a in np.round(np.arange(-0.9, 0.01, 0.1), 10):
        for b in range(-2, 3):
            fam.append((f"t^{a:g}*log^{b}", PowLogFn([(1.0, float(a), float(b))])))
    rng = np.random.default_rng(seed)
    for i in range(n_random):
        k = int(rng.integers(2, 13))
        cuts = np.sort(10.0 ** rng.uniform(-30, 0, size=k - 1))
        vals = np.sort(rng.exponential(1.0, size=k))[::-1]
        fam.append((f"random_step_{i}", StepFn(np.concatenate([[0.0], cuts, [1.0]]), vals)))
    return fam


def _on_grid(f, grid: Grid):
    if isinstance(f, PowLogFn):
        vals = np.asarray(f(grid.nodes), dtype=float)
        return GridFn(grid, np.abs(vals))
    return f


def op_norm_estimate(
    op: Operator,
    domain: SpaceSpec,
    target: SpaceSpec,
    family: Sequence[Member] | None = None,
    refinements: Sequence[float] = REFINEMENTS,
    points_per_decade: int | None = None,
    seed: int = 0,
    witness: Member | None = None,
) -> OpNormReport:
    """Largest ratio over ``family`` on grids with shrinking ``t_min``.

    The verdict is ``"bounded"`` when the best ratio stays within 10%
    across refinements, ``"diverging"`` when it keeps growing (see
    ``riopt.trend.classify``) and ``"inconclusive"`` otherwise.  A
    diverging verdict names the member with the largest growth, together
    with its exact domain norm when it is a ``PowLogFn``.
    """
    if not validate_spec(domain) or not validate_spec(target):
        raise SpecError("inadmissible domain or target space")
    fam = list(family) if family is not None else default_family(seed)
    if witness is not None and witness[0] not in {label for label, _ in fam}:
        fam.append(witness)
    if not fam:
        raise ParameterError("the test family is empty")
    ppd = points_per_decade or grid_from_env()[1]
    trend = []
    per_member = {label: [] for label, _ in fam}
    for t_min in refinements:
        grid = make_log_grid(t_min, ppd)
        best, best_label = -math.inf, ""
        for label, f in fam:
            fg = _on_grid(f, grid)
            dn = norm(domain, fg, grid)
            if not (dn > 0) or math.isinf(dn):
                per_member[label].append(math.nan)
                continue
            tn = norm(target, op.apply(fg, grid), grid)
            r = tn / dn
            per_member[label].append(r)
            if r > best:
                best, best_label = r, label
        trend.append((t_min, best))
    values = [r for _, r in trend]
    verdict = classify(values, refinements)
    rep = OpNormReport(
        best_ratio=values[-1],
        attaining_function=best_label,
        refinement_trend=trend,
        verdict=verdict,
        operator=op.describe(),
        domain=_describe(domain),
        target=_describe(target),
    )
    if verdict == "diverging":
        rep.certificate = _certificate(fam, per_member, domain, refinements)
    return rep


def _describe(s) -> str:
    return s.describe() if hasattr(s, "describe") else repr(s)


def _exact_domain_norm(domain, f) -> Optional[float]:
    """Norm of a ``PowLogFn`` member without truncation.

    Finiteness is decided near zero, so a member that is not monotone on
    ``(0, 1)`` is restricted to the largest ``(0, 10**-k)`` where it is.
    """
    if not isinstance(f, PowLogFn):
        return None
    g = f
    for k in range(0, 9):
        g = f.restrict(10.0**-k) if k else f
        if g.is_nonincreasing() and g.is_nonnegative():
            break
    return norm(domain, g)


def _certificate(fam, per_member, domain, refinements) -> dict:
    found = []
    for label, seq in per_member.items():
        arr = np.asarray(seq, dtype=float)
        if arr.size < 2 or np.any(~np.isfinite(arr)) or arr[0] <= 0:
            continue
        if classify(arr, refinements) == "diverging":
            found.append((arr[-1] / arr[0], label))
    if not found:
        return {}
    members = dict(fam)
    scored = []
    for growth, label in found:
        exact = _exact_domain_norm(domain, members[label])
        finite = exact is None or math.isfinite(exact)
        scored.append((finite, growth, label, exact))
    finite, _, best_label, exact = max(scored)
    return {
        "witness": best_label,
        "ratios": [float(x) for x in per_member[best_label]],
        "domain_norm_exact": exact,
        "domain_norm_finite": bool(finite),
    }


# --------------------------------------------------------------------------
# weighted Hardy condition for T_gamma on L^{1,1;1-gamma}


def lemma37_condition(gamma: float, refinements: Sequence[float] = REFINEMENTS, points_per_decade: int | None = None) -> dict:
    """Ratio of the two sides of the weighted condition for ``T_gamma``.

    With ``u(t) = t**gamma`` and ``v = w = log(2/t)**(1-gamma)`` the left
    side ``int_0^t s**-gamma sup_{s<=tau<=t} u(tau) w(s) ds`` is computed
    on the grid through the windowed-supremum kernel (exact cell weights,
    tail below ``t_min`` included) and also in closed form as
    ``t**gamma int_0^t s**-gamma w``; the right side is ``int_0^t v``.

    Returns
    -------
    dict
        ``max_ratio`` per refinement, the flatness verdict, the largest
        discrepancy between the two left-side routes and ``holds``.
    """
    if not (0.0 < gamma < 1.0):
        raise ParameterError(f"gamma must lie in (0, 1), got {gamma}")
    ppd = points_per_decade or grid_from_env()[1]
    k = 1.0 - gamma
    maxima, route_gap, limits = [], 0.0, []
    for t_min in refinements:
        g = make_log_grid(t_min, ppd)
        t = g.nodes
        w_cells = powlog_cells(-gamma, k, t[:-1], t[1:])
        tail = quad_powlog(-gamma, k, 0.0, t[0])
        u = t**gamma
        body = kernels.window_sup_integral(np.ascontiguousarray(u), np.ascontiguousarray(np.concatenate([w_cells, [0.0]])))
        lhs_kernel = tail * np.maximum.accumulate(u) + body
        lhs_closed = u * (tail + np.concatenate([[0.0], np.cumsum(w_cells)]))
        rhs = quad_powlog(0.0, k, 0.0, t[0]) + np.concatenate([[0.0], np.cumsum(powlog_cells(0.0, k, t[:-1], t[1:]))])
        ratio = lhs_kernel / rhs
        route_gap = max(route_gap, float(np.max(np.abs(lhs_kernel - lhs_closed) / lhs_closed)))
        maxima.append(float(np.max(ratio)))
        limits.append(float(ratio[0]))
    verdict = classify(maxima, refinements)
    return {
        "gamma": gamma,
        "refinements": list(refinements),
        "max_ratio": maxima[-1],
        "max_ratio_trend": maxima,
        "ratio_at_t_min": limits,
        "asymptotic_ratio": 1.0 / (1.0 - gamma),
        "route_gap": route_gap,
        "verdict": verdict,
        "holds": bool(verdict == "bounded" and math.isfinite(maxima[-1])),
    }
