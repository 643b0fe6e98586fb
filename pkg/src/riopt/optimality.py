"""Optimal domain and target functionals and the nonexistence pipeline.

The one-dimensional Copson inequality decides Sobolev embeddings on the
whole Maz'ya class.  This module evaluates it over test families, builds
the optimal target (through the associate space) and the optimal domain
functionals, decides whether the fundamental Orlicz space is the largest
Orlicz space inside a given space, and runs the witness computation
showing that for exponential-type targets no largest Orlicz domain
exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate as spi
from scipy import optimize as spo

from .errors import ParameterError, PreconditionError, UnsupportedDualityError
from .funcrep import (
    Function,
    Grid,
    GridFn,
    PowLogFn,
    StepFn,
    default_grid,
    grid_from_env,
    make_log_grid,
    quad_powlog,
)
from .operators import CopsonOp, OpNormReport, _on_grid, copson, op_norm_estimate
from .rearrange import SmoothProfile, _product_integral, _step_primitive, sorted_steps, star_stepfn
from .spaces import (
    INF,
    Exponential,
    FundamentalFn,
    Lambda,
    Lebesgue,
    Lorentz,
    LorentzZygmund,
    Marcinkiewicz,
    MembershipReport,
    Orlicz,
    SpaceSpec,
    YoungFn,
    _as_fundamental,
    exp_space,
    fundamental_numeric,
    fundamental_orlicz,
    luxemburg_norm,
    norm,
    orlicz_membership,
    validate_spec,
)
from .trend import REFINEMENTS, classify, loglog_slope

NO_LARGEST = "no_largest_orlicz"
LARGEST = "largest_orlicz_exists"
UNDECIDED = "undecided_by_transfer"
SLOPE_TOL = 0.10
LEMMA36_EPS = 1e-6


# --------------------------------------------------------------------------
# problem description


@dataclass(frozen=True, eq=False)
class EmbeddingProblem:
    """``W^m X -> Y`` on the Maz'ya class with exponent ``alpha``.

    Parameters
    ----------
    m : int
        Order of the derivatives.
    alpha : float
        Isoperimetric exponent in ``[1 - 1/n, 1)``.
    domain, target : SpaceSpec, optional
        The spaces ``X`` and ``Y``.
    q : float, optional
        Second index when the target sits on the ``L^{inf,q;.}`` scale.
    n : int
        Ambient dimension, used only to bound ``alpha``.
    """

    m: int
    alpha: float
    domain: Optional[SpaceSpec] = None
    target: Optional[SpaceSpec] = None
    q: Optional[float] = None
    n: int = 2

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ParameterError(f"m must be a positive integer, got {self.m}")
        if not (1.0 - 1.0 / self.n - 1e-12 <= self.alpha < 1.0):
            raise ParameterError(f"alpha must lie in [1 - 1/n, 1), got {self.alpha}")
        if self.q is not None and not (self.q >= 1.0):
            raise ParameterError(f"q must lie in [1, inf], got {self.q}")

    @property
    def c(self) -> float:
        """``m(1 - alpha)``."""
        return self.m * (1.0 - self.alpha)

    @property
    def op(self) -> CopsonOp:
        return CopsonOp(self.m, self.alpha, self.n)


# --------------------------------------------------------------------------
# reduction principle


def reduction_check(
    p: EmbeddingProblem,
    family=None,
    refinements: Sequence[float] = REFINEMENTS,
    points_per_decade: int | None = None,
    seed: int = 0,
    witness=None,
) -> OpNormReport:
    """Test ``||int_t^1 f(s) s^(-1+c) ds||_Y <= C ||f||_X`` over a family.

    A bounded verdict is empirical evidence for the embedding; a
    diverging verdict refutes it and names the witness.
    """
    if p.domain is None or p.target is None:
        raise ParameterError("reduction_check needs both a domain and a target")
    return op_norm_estimate(p.op, p.domain, p.target, family, refinements, points_per_decade, seed, witness)


# --------------------------------------------------------------------------
# associate spaces


def _conj(p: float) -> float:
    if p == 1.0:
        return INF
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def associate(s: SpaceSpec) -> SpaceSpec:
    """Associate space from the closed-form duality table.

    Covers Lebesgue, Lorentz and Lorentz-Zygmund spaces on their norm
    ranges, ``exp L^beta`` (whose associate is ``L^{1,1;1/beta}``) and the
    endpoint pair ``Lambda_phi <-> M_{t/phi}`` for single-atom ``phi``.

    Raises
    ------
    UnsupportedDualityError
        For any space outside the table.
    """
    if isinstance(s, Lebesgue):
        return Lebesgue(_conj(s.p))
    if isinstance(s, Lorentz):
        if 1.0 < s.p < INF and 1.0 <= s.q <= INF:
            return Lorentz(_conj(s.p), _conj(s.q))
        if s.p == 1.0 and s.q == 1.0:
            return Lebesgue(INF)
        if math.isinf(s.p) and math.isinf(s.q):
            return Lebesgue(1.0)
    if isinstance(s, LorentzZygmund):
        p, q, z = s.p, s.q, s.zeta
        if 1.0 < p < INF and 1.0 <= q <= INF:
            return LorentzZygmund(_conj(p), _conj(q), -z)
        if p == 1.0 and q == 1.0 and z >= 0:
            return LorentzZygmund(INF, INF, -z)
        if math.isinf(p) and math.isinf(q) and z <= 0:
            return LorentzZygmund(1.0, 1.0, -z)
    if isinstance(s, Orlicz) and isinstance(s.A.asymptote, Exponential):
        return LorentzZygmund(1.0, 1.0, 1.0 / s.A.asymptote.beta)
    if isinstance(s, (Lambda, Marcinkiewicz)) and isinstance(s.phi.phi, PowLogFn) and len(s.phi.phi.atoms) == 1:
        c0, a, b = s.phi.phi.atoms[0]
        dual = FundamentalFn(PowLogFn([(1.0 / c0, 1.0 - a, -b)]), s.phi.grid, label=f"t/({s.phi.label})")
        return Marcinkiewicz(dual) if isinstance(s, Lambda) else Lambda(dual)
    raise UnsupportedDualityError(f"no closed-form associate for {getattr(s, 'describe', lambda: repr(s))()}")


def holder_lower_bound(s: SpaceSpec, f: Function, family: Sequence, grid: Grid | None = None) -> float:
    """``max_g int f* g* / ||g||_s`` over ``family``, a lower bound for ``||f||_{s'}``."""
    grid = grid or default_grid()
    fs = sorted_steps(_steps_of(f, grid))
    best = 0.0
    for _, g in family:
        gs = sorted_steps(_steps_of(g, grid))
        ng = norm(s, gs)
        if ng > 0 and math.isfinite(ng):
            best = max(best, _product_integral(fs, gs) / ng)
    return best


def _steps_of(f: Function, grid: Grid) -> StepFn:
    if isinstance(f, StepFn):
        return f
    if isinstance(f, GridFn):
        return f.to_stepfn()
    return GridFn(grid, np.abs(np.asarray(f(grid.nodes), dtype=float))).to_stepfn()


# --------------------------------------------------------------------------
# optimal target


def _primitive_of_star(f: Function, grid: Grid):
    """``(F, breaks, star)`` with ``F(t) = int_0^t f*``."""
    if isinstance(f, PowLogFn) and f.is_nonincreasing(grid) and f.is_nonnegative(grid):
        prof = SmoothProfile(f)
        return prof.primitive, np.array([f.support]), None
    star = star_stepfn(f if not isinstance(f, PowLogFn) else _on_grid(f, grid))
    return (lambda t: _step_primitive(star, t)), star.breaks, star


def _log_quad(fun: Callable[[float], float], pts: np.ndarray) -> float:
    """``int_0^1 fun`` over panels between ``pts`` in ``log t``."""
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi <= lo:
            continue
        val, _ = spi.quad(lambda x: fun(math.exp(x)) * math.exp(x), math.log(lo), math.log(hi), epsabs=0.0, epsrel=1e-12, limit=200)
        total += val
    return total


def optimal_target_norm(
    p: EmbeddingProblem, f: Function, grid: Grid | None = None, associate_space: SpaceSpec | None = None
) -> float:
    """``|| t^(-1+c) int_0^t f*(s) ds ||_{X'}`` with ``c = m(1 - alpha)``.

    This is the associate norm of the optimal target space for the
    domain ``X = p.domain``.  ``X'`` comes from ``associate`` unless given.
    Lebesgue associates are integrated by adaptive quadrature on panels
    that include every breakpoint of ``f*``; other associates see the step
    function of the samples at the grid nodes and those breakpoints.
    """
    grid = grid or default_grid()
    if associate_space is None:
        if p.domain is None:
            raise ParameterError("need a domain space or an explicit associate")
        associate_space = associate(p.domain)
    c = p.c
    F, breaks, star = _primitive_of_star(f, grid)

    def g(t):
        t = np.asarray(t, dtype=float)
        return t ** (c - 1.0) * F(t)

    inner = breaks[(breaks > 0) & (breaks < 1)]
    if isinstance(associate_space, Lebesgue):
        r = associate_space.p
        if math.isinf(r):
            return _sup_target(g, inner, star, c)
        pts = np.unique(np.concatenate([np.geomspace(1e-300, 1.0, 31), inner]))
        val = _log_quad(lambda t: float(g(np.array([t]))[0]) ** r, pts)
        return val ** (1.0 / r) if math.isfinite(val) else INF
    pts = np.unique(np.concatenate([grid.nodes, inner]))
    cells = np.concatenate([[0.0], np.sqrt(pts[:-1] * pts[1:]), [1.0]])
    return norm(associate_space, StepFn(cells, g(pts)))


def _sup_target(g, inner, star, c) -> float:
    t = np.unique(np.concatenate([np.geomspace(1e-300, 1.0, 6001), inner]))
    vals = g(t)
    best = float(np.max(vals))
    if star is not None:
        # on a cell of f* the function is t^(c-1) (A + B t), maximal at t = (1-c)A/(cB)
        b = star.breaks
        FA = _step_primitive(star, b[:-1])
        A = FA - star.values * b[:-1]
        B = star.values
        with np.errstate(divide="ignore", invalid="ignore"):
            crit = (1.0 - c) * A / (c * B)
        ok = (crit > b[:-1]) & (crit < b[1:]) & np.isfinite(crit)
        if np.any(ok):
            best = max(best, float(np.max(g(crit[ok]))))
        return best
    k = int(np.argmax(vals))
    lo, hi = t[max(k - 1, 0)], t[min(k + 1, t.size - 1)]
    if hi > lo:
        res = spo.minimize_scalar(lambda x: -float(g(np.array([math.exp(x)]))[0]), bounds=(math.log(lo), math.log(hi)), method="bounded")
        best = max(best, float(-res.fun))
    return best


def target_level_exponent(p: EmbeddingProblem, a_values=None, grid: Grid | None = None) -> dict:
    """Fundamental level of the optimal target read off the associate functional.

    With ``phi'(a)`` the associate functional of ``chi_(0,a)``, the target
    has fundamental function ``a/phi'(a)``; its exponent against
    ``log(2/a)`` is fitted by least squares.
    """
    a_values = np.geomspace(1e-12, 1e-2, 11) if a_values is None else np.asarray(a_values, dtype=float)
    phi_assoc = np.array([optimal_target_norm(p, StepFn.indicator(0.0, float(a)), grid) for a in a_values])
    level = a_values / phi_assoc
    return {"a": a_values.tolist(), "level": level.tolist(), "exponent": loglog_slope(a_values, level)}


# --------------------------------------------------------------------------
# optimal domain


def copson_norm(p: EmbeddingProblem, h: Function, grid: Grid | None = None) -> float:
    """``|| int_t^1 s^(-1+c) h(s) ds ||_Y`` without rearranging ``h``."""
    grid = grid or default_grid()
    if p.target is None:
        raise ParameterError("need a target space")
    if isinstance(h, PowLogFn):
        h = _on_grid(h, grid)
    return norm(p.target, copson(p.op, h, grid), grid)


def optimal_domain_norm(p: EmbeddingProblem, f: Function, grid: Grid | None = None) -> float:
    """``|| int_t^1 s^(-1+c) f*(s) ds ||_Y``.

    The supremum over functions equimeasurable with ``f`` is replaced by
    the rearrangement ``f*`` itself.  Returns ``inf`` when divergent.
    """
    grid = grid or default_grid()
    if isinstance(f, PowLogFn):
        fs = _on_grid(f, grid)
        fs = GridFn(grid, np.sort(fs.values)[::-1]) if not fs.nonincreasing else fs
    else:
        fs = sorted_steps(f.to_stepfn() if isinstance(f, GridFn) else f)
    return copson_norm(p, fs, grid)


def permutation_gap(p: EmbeddingProblem, values: Sequence[float], grid: Grid | None = None) -> dict:
    """Largest change of the domain functional over cell permutations.

    ``values`` sit on equal cells of ``(0, 1)``; every permutation is
    equimeasurable with the sorted one.
    """
    from itertools import permutations

    grid = grid or default_grid()
    v = np.asarray(values, dtype=float)
    base = optimal_domain_norm(p, StepFn.from_cells(v), grid)
    best = base
    for perm in permutations(range(v.size)):
        best = max(best, copson_norm(p, StepFn.from_cells(v[list(perm)]), grid))
    return {"f_star_form": base, "sup_form": best, "ratio": best / base if base > 0 else math.nan}


# --------------------------------------------------------------------------
# characteristic functions with a power defect


def lemma36_check(zeta: float, a: float, s: SpaceSpec, grid: Grid | None = None) -> dict:
    """Ratio ``||chi_(0,a)(a^zeta - t^zeta)||_s / (a^zeta ||chi_(0,a)||_s)``.

    The ratio never exceeds 1 and never drops below ``(1 - 2^-zeta)/2``;
    ``holds`` tests this window with slack ``1e-6``.
    """
    if not zeta > 0:
        raise ParameterError(f"zeta must be positive, got {zeta}")
    if not 0.0 < a < 1.0:
        raise ParameterError(f"a must lie in (0, 1), got {a}")
    if not validate_spec(s):
        raise ParameterError(f"inadmissible space {s!r}")
    az = a**zeta
    f = PowLogFn([(az, 0.0, 0.0), (-1.0, zeta, 0.0)], support=a)
    num = norm(s, f, grid)
    den = az * norm(s, StepFn.indicator(0.0, a), grid)
    ratio = num / den
    lower = (1.0 - 2.0**-zeta) / 2.0
    return {
        "zeta": zeta,
        "a": a,
        "space": s.describe(),
        "ratio": ratio,
        "lower": lower,
        "holds": bool(lower - LEMMA36_EPS <= ratio <= 1.0 + LEMMA36_EPS),
    }


# --------------------------------------------------------------------------
# principal alternative


def _in_orlicz(A: YoungFn, f) -> bool:
    if isinstance(f, PowLogFn):
        return A.integral_finite(f, 1.0)
    return True


def principal_alternative(
    phi_X,
    X_norm: Callable[[Function, Grid], float],
    family: Sequence,
    refinements: Sequence[float] = REFINEMENTS,
    points_per_decade: int | None = None,
) -> dict:
    """Decide whether the fundamental Orlicz space of ``X`` sits inside ``X``.

    ``A = fundamental_orlicz(phi_X)``.  Each member of ``family`` that lies
    in ``L^A`` is evaluated in ``X`` and in ``L^A`` on grids with shrinking
    ``t_min``.  A member whose ``X`` norm and whose ratio to the ``L^A``
    norm both diverge certifies ``no_largest_orlicz``; a bounded worst ratio ``||f||_X / ||f||_{L^A}``
    certifies ``largest_orlicz_exists``.  Otherwise the decision is
    ``None`` and the evidence carries ``inconclusive = True``.
    """
    A = fundamental_orlicz(phi_X)
    ppd = points_per_decade or grid_from_env()[1]
    members = [(lab, f) for lab, f in family if _in_orlicz(A, f)]
    x_norms = {lab: [] for lab, _ in members}
    ratios = {lab: [] for lab, _ in members}
    worst = []
    for t_min in refinements:
        grid = make_log_grid(t_min, ppd)
        best = 0.0
        for lab, f in members:
            fg = _on_grid(f, grid)
            xn = X_norm(fg, grid)
            an = luxemburg_norm(A, fg, grid)
            x_norms[lab].append(xn)
            r = xn / an if an > 0 else math.nan
            ratios[lab].append(r)
            if math.isfinite(r):
                best = max(best, r)
        worst.append(best)
    diverging = [
        lab
        for lab in x_norms
        if classify(x_norms[lab], refinements) == "diverging" and classify(ratios[lab], refinements) == "diverging"
    ]
    trend = classify(worst, refinements)
    if diverging:
        decision = NO_LARGEST
    elif trend == "bounded":
        decision = LARGEST
    else:
        decision = None
    evidence = {
        "orlicz": A.describe(),
        "members_in_orlicz": len(members),
        "refinements": list(refinements),
        "worst_ratio_trend": worst,
        "ratio_verdict": trend,
        "witnesses": diverging,
        "witness_norms": {lab: x_norms[lab] for lab in diverging},
        "inconclusive": decision is None,
    }
    return {"decision": decision, "evidence": evidence}


def thm35_transfer(y_level, marcinkiewicz_result, witness=None) -> dict:
    """Carry a nonexistence decision for ``M_phi`` to every space on the level.

    Only the ``no_largest_orlicz`` outcome transfers; anything else leaves
    the level undecided by this argument.  The witness passes through.
    """
    phi = _as_fundamental(y_level)
    decision = marcinkiewicz_result.get("decision") if isinstance(marcinkiewicz_result, dict) else marcinkiewicz_result
    if witness is None and isinstance(marcinkiewicz_result, dict):
        ws = marcinkiewicz_result.get("evidence", {}).get("witnesses") or []
        witness = ws[0] if ws else None
    if decision == NO_LARGEST:
        return {"decision": NO_LARGEST, "level": phi.label, "applies_to": "every r.i. space with this fundamental function", "witness": witness}
    return {"decision": UNDECIDED, "level": phi.label, "applies_to": None, "witness": witness}


# --------------------------------------------------------------------------
# nonexistence pipeline for exponential targets


@dataclass
class NonexistenceReport:
    """Outcome of the witness computation for one ``(m, alpha, q, beta)``."""

    m: int
    alpha: float
    q: float
    phi_X: FundamentalFn
    fundamental_orlicz_id: dict
    beta: float
    beta_interval: tuple
    membership: bool
    divergence_slope: float
    expected_slope: float
    verdict: str
    level: str = ""
    level_verified: bool = False
    q_in_statement_range: bool = False
    q_in_proof_range: bool = False
    phi_X_check: dict = field(default_factory=dict)
    membership_report: Optional[MembershipReport] = None
    S_table: tuple = ((), ())

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "alpha": self.alpha,
            "q": _jsonable(self.q),
            "level": self.level,
            "level_verified": self.level_verified,
            "q_in_statement_range": self.q_in_statement_range,
            "q_in_proof_range": self.q_in_proof_range,
            "phi_X": self.phi_X.label,
            "phi_X_check": self.phi_X_check,
            "fundamental_orlicz_id": self.fundamental_orlicz_id,
            "beta": self.beta,
            "beta_interval": list(self.beta_interval),
            "membership": self.membership,
            "membership_detail": self.membership_report.to_dict() if self.membership_report else None,
            "divergence_slope": self.divergence_slope,
            "expected_slope": self.expected_slope,
            "verdict": self.verdict,
        }


def _jsonable(x: float):
    return "inf" if isinstance(x, float) and math.isinf(x) else x


def beta_interval(m: int, alpha: float) -> tuple[float, float]:
    """Open interval of witness exponents ``(-c, 1 - 2c)``, ``c = m(1 - alpha)``."""
    c = m * (1.0 - alpha)
    if c >= 1.0:
        raise PreconditionError(f"m(1 - alpha) = {c:g} >= 1: the witness interval is empty")
    return (-c, 1.0 - 2.0 * c)


def witness_fn(m: int, alpha: float, beta: float) -> PowLogFn:
    """``t^(-c) log(2/t)^beta``."""
    return PowLogFn([(1.0, -m * (1.0 - alpha), beta)])


def witness_ratio(m: int, alpha: float, beta: float, t) -> np.ndarray:
    """``int_t^1 s^(-1+c) f_beta(s) ds / log(2/t)^(1-c)``."""
    c = m * (1.0 - alpha)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    num = np.array([quad_powlog(-1.0, beta, float(x), 1.0) for x in t])
    return num / np.log(2.0 / t) ** (1.0 - c)


def level_check(c: float, q: float, grid: Grid | None = None) -> dict:
    """Does ``L^{inf,q;-(1-c)-1/q}`` have fundamental function ``log(2/t)^-(1-c)``?"""
    grid = grid or make_log_grid(1e-30, 8)
    zeta = -(1.0 - c) - (0.0 if math.isinf(q) else 1.0 / q)
    s = LorentzZygmund(INF, q, zeta)
    if not validate_spec(s):
        return {"space": s.describe(), "verified": False, "ratio_spread": math.nan}
    vals = fundamental_numeric(s, grid).values
    ref = np.log(2.0 / grid.nodes) ** -(1.0 - c)
    r = vals / ref
    spread = float(np.max(r) / np.min(r))
    return {"space": s.describe(), "verified": bool(spread <= 1.0 + 0.10), "ratio_spread": spread}


def phi_X_profile(m: int, alpha: float, a_values=None, grid: Grid | None = None) -> dict:
    """Domain functional of ``chi_(0,a)`` against ``a^c log(2/a)^(c-1)``."""
    c = m * (1.0 - alpha)
    grid = grid or default_grid()
    a_values = np.geomspace(1e-10, 0.5, 41) if a_values is None else np.asarray(a_values, dtype=float)
    p = EmbeddingProblem(m, alpha, target=exp_space(1.0 / (1.0 - c)))
    vals = np.array([optimal_domain_norm(p, StepFn.indicator(0.0, float(a)), grid) for a in a_values])
    closed = a_values**c * np.log(2.0 / a_values) ** (c - 1.0)
    r = vals / closed
    return {
        "a": a_values.tolist(),
        "values": vals.tolist(),
        "closed_form": closed.tolist(),
        "max_over_min": float(np.max(r) / np.min(r)),
    }


def thm38_pipeline(
    m: int,
    alpha: float,
    q: float = INF,
    beta: float | None = None,
    n: int = 2,
    grid: Grid | None = None,
    t_range: tuple = (1e-30, 1e-3),
    n_points: int = 55,
) -> NonexistenceReport:
    """Witness computation against the largest Orlicz domain for ``exp L`` targets.

    Steps: the target level ``log(2/t)^-(1-c)``; the domain fundamental
    function from characteristic functions, cross-checked against
    ``a^c log(2/a)^(c-1)``; its fundamental Orlicz space; the witness
    ``f_beta = t^-c log(2/t)^beta`` (default ``beta`` is the midpoint of
    ``(-c, 1 - 2c)``); its membership in that Orlicz space; and the growth
    of ``S(t) = int_t^1 s^(-1+c) f_beta / log(2/t)^(1-c)``, whose slope
    against ``log log(2/t)`` over ``t_range`` must be within 10% of
    ``beta + c``.

    Raises
    ------
    PreconditionError
        When ``m(1 - alpha) >= 1``.
    ParameterError
        When ``beta`` lies outside the open interval.
    """
    c = m * (1.0 - alpha)
    lo, hi = beta_interval(m, alpha)
    EmbeddingProblem(m, alpha, q=None if q is None else q, n=n)
    if beta is None:
        beta = 0.5 * (lo + hi)
    if not lo < beta < hi:
        raise ParameterError(f"beta = {beta:g} lies outside ({lo:g}, {hi:g})")
    # (1) target level
    lev = level_check(c, q)
    level = f"log^{-(1.0 - c):g}"
    # (2) domain fundamental function
    chk = phi_X_profile(m, alpha, grid=grid)
    phi_X = FundamentalFn(PowLogFn([(1.0, c, c - 1.0)]), grid, label=f"t^{c:g} log^{c - 1.0:g}")
    # (3) fundamental Orlicz space
    A = fundamental_orlicz(phi_X)
    # (4)-(5) witness and membership
    f = witness_fn(m, alpha, beta)
    mem = orlicz_membership(A, f)
    # (6) growth of the reduced inequality
    t = np.geomspace(t_range[0], t_range[1], n_points)
    S = witness_ratio(m, alpha, beta, t)
    slope = loglog_slope(t, S)
    expected = beta + c
    ok = mem.member is True and abs(slope - expected) <= SLOPE_TOL * abs(expected)
    return NonexistenceReport(
        m=m,
        alpha=alpha,
        q=q,
        phi_X=phi_X,
        fundamental_orlicz_id=A.asymptote.describe(),
        beta=beta,
        beta_interval=(lo, hi),
        membership=bool(mem.member),
        divergence_slope=slope,
        expected_slope=expected,
        verdict="nonexistence_certified" if ok else "inconclusive",
        level=level,
        level_verified=lev["verified"],
        q_in_statement_range=bool(q >= 1.0 / c),
        q_in_proof_range=bool(q >= 1.0 / (1.0 - c)),
        phi_X_check={"max_over_min": chk["max_over_min"], "bound": 20.0, "holds": chk["max_over_min"] <= 20.0, "level_space": lev},
        membership_report=mem,
        S_table=(t.tolist(), S.tolist()),
    )


def example_targets(m: int, alpha: float) -> list[dict]:
    """Optimal targets for ``W^m L^{1/c, q}`` at ``q in {1, 1/c, inf}``.

    Each row lists the stated optimal target and the level measured from
    the associate functional of the computed optimal target.
    """
    c = m * (1.0 - alpha)
    if c >= 1.0:
        raise PreconditionError(f"m(1 - alpha) = {c:g} >= 1: no Lorentz domain L^(1/c, q) with 1/c > 1")
    rows = []
    stated = [
        (1.0, "L:inf", 0.0),
        (1.0 / c, f"LZ:inf,{1.0 / c:g},-1", -(1.0 - c)),
        (INF, f"expL:{1.0 / (1.0 - c):g}", -(1.0 - c)),
    ]
    for q, target, expo in stated:
        p = EmbeddingProblem(m, alpha, domain=Lorentz(1.0 / c, q))
        meas = target_level_exponent(p, grid=make_log_grid(1e-30, 16))["exponent"]
        rows.append({"q": _jsonable(q), "target": target, "stated_level_exponent": expo, "measured_level_exponent": meas})
    return rows
