"""Space specifications, Young functions and norm evaluation.

Every norm is computed from the non-increasing rearrangement through
one of the profile engines in ``riopt.rearrange``; this module only
decides which functional of f* to evaluate.
"""

from __future__ import annotations

import json
import math
import warnings
import os
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from . import kernels
from .errors import DomainError, ParameterError, ParseError, PreconditionError, SpecError
from .funcrep import (
    LOG2,
    Function,
    Grid,
    GridFn,
    PowLogFn,
    StepFn,
    _num,
    default_grid,
    parse_powlog,
)
from .rearrange import SmoothProfile, StepProfile, profile_of

INF = math.inf

# --------------------------------------------------------------------------
# asymptote descriptors


@dataclass(frozen=True)
class PowerLog:
    """``t**p * log(t)**a`` near infinity."""

    p: float
    a: float = 0.0

    def describe(self) -> dict:
        return {"type": "PowerLog", "p": self.p, "a": self.a}


@dataclass(frozen=True)
class Exponential:
    """``exp(t**beta)`` near infinity."""

    beta: float

    def describe(self) -> dict:
        return {"type": "Exponential", "beta": self.beta}


@dataclass(frozen=True)
class LInfinity:
    """``inf * chi_(1, inf)``."""

    def describe(self) -> dict:
        return {"type": "LInfinity"}


Asymptote = Union[PowerLog, Exponential, LInfinity]


def _rank(d: Asymptote) -> tuple:
    if isinstance(d, LInfinity):
        return (2, 0.0, 0.0)
    if isinstance(d, Exponential):
        return (1, d.beta, 0.0)
    return (0, d.p, d.a)


# --------------------------------------------------------------------------
# Young functions


def _bisect_log(logfun: Callable[[np.ndarray], np.ndarray], target: np.ndarray, lo: float, hi: float, iters: int = 200):
    """Vectorized bisection for ``logfun(x) = target`` on ``[lo, hi]``."""
    a = np.full(target.shape, lo, dtype=float)
    b = np.full(target.shape, hi, dtype=float)
    for _ in range(iters):
        m = 0.5 * (a + b)
        below = logfun(m) <= target
        a = np.where(below, m, a)
        b = np.where(below, b, m)
        if np.all(b - a <= 1e-15 * np.maximum(1.0, np.abs(a))):
            break
    return 0.5 * (a + b)


class YoungFn:
    """Young function with evaluation, inverse and asymptote.

    Use the constructors ``power``, ``powerlog``, ``exponential``,
    ``linfinity``, ``from_callable`` or ``fundamental_orlicz``.

    Parameters
    ----------
    log_eval : callable
        ``x -> log A(exp(x))``, vectorized.
    inverse : callable
        Generalized right-continuous inverse, vectorized.
    asymptote : PowerLog, Exponential or LInfinity
        Behavior near infinity.
    name : str
        Human-readable label.
    """

    def __init__(self, log_eval, inverse, asymptote: Asymptote, name: str, eval_fn=None, meta: dict | None = None):
        self._log_eval = log_eval
        self._inverse = inverse
        self._eval = eval_fn
        self.asymptote = asymptote
        self.name = name
        self.meta = meta or {}

    def __repr__(self) -> str:
        return f"YoungFn({self.name})"

    # evaluation ----------------------------------------------------------
    def log_eval(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            out = np.asarray(self._log_eval(x), dtype=float)
        out = np.where(np.isneginf(x), -INF, out)
        return out if out.ndim else float(out)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self._eval is not None:
            with np.errstate(all="ignore"):
                out = np.asarray(self._eval(t), dtype=float)
        else:
            with np.errstate(divide="ignore"):
                lx = np.log(t)
            with np.errstate(over="ignore"):
                out = np.exp(self.log_eval(lx))
            out = np.where(t > 0, out, 0.0)
        out = np.where(np.isinf(t) & (t > 0), INF, out)
        return out if out.ndim else float(out)

    eval = __call__

    def inverse(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(all="ignore"):
            out = np.asarray(self._inverse(u), dtype=float)
        return out if out.ndim else float(out)

    # descriptors ---------------------------------------------------------
    def describe(self) -> dict:
        return {"name": self.name, "asymptote": self.asymptote.describe()}

    def integral_finite(self, f: PowLogFn, lam: float) -> bool:
        """Is ``int_0 A(f/lam)`` finite for a non-increasing ``PowLogFn``?"""
        f0 = f.limit0()
        d = self.asymptote
        if math.isfinite(f0):
            if isinstance(d, LInfinity):
                return f0 / lam <= 1.0
            return True
        _, ga, gb = f.leading()
        c0 = f.leading()[0]
        if isinstance(d, LInfinity):
            return False
        if isinstance(d, PowerLog):
            if ga < 0:
                ea, eb = d.p * ga, d.p * gb + d.a
                return ea > -1.0 or (ea == -1.0 and eb < -1.0)
            return True
        # exponential growth
        if ga < 0:
            return False
        k = gb * d.beta
        if k < 1.0 - 1e-12:
            return True
        if k > 1.0 + 1e-12:
            return False
        return (c0 / lam) ** d.beta < 1.0

    # constructors --------------------------------------------------------
    @classmethod
    def power(cls, p: float) -> "YoungFn":
        """``A(t) = t**p`` exactly, ``p >= 1``."""
        if not p >= 1.0:
            raise ParameterError(f"power Young function needs p >= 1, got {p}")
        return cls(
            lambda x: p * x,
            lambda u: np.where(u > 0, np.power(np.maximum(u, 0.0), 1.0 / p), 0.0),
            PowerLog(p, 0.0),
            f"t^{p:g}",
            eval_fn=lambda t: np.power(t, p),
            meta={"type": "power", "p": p},
        )

    @classmethod
    def powerlog(cls, p: float, r: float) -> "YoungFn":
        """``t**p * log(t)**r`` for ``t >= T0``, linear on ``[0, T0]``.

        ``T0 = exp(l0)`` is the smallest point from which the formula is
        convex with slope ratio ``p + r/log t >= 1``; ``T0 = 1`` when
        ``r = 0``.  Requires ``p > 1`` or ``p = 1, r >= 0``.
        """
        if p < 1.0 or (p == 1.0 and r < 0.0):
            raise ParameterError(f"t^{p} log^{r} t is not a Young function near infinity")
        if r == 0.0:
            l0 = 0.0
        elif r < 0.0:
            l0 = max(1.0, -r / (p - 1.0))
        else:
            l0 = 1.0
        logA0 = p * l0 + (r * math.log(l0) if r != 0.0 else 0.0)
        slope0 = logA0 - l0  # log of A(T0)/T0

        def log_eval(x):
            x = np.asarray(x, dtype=float)
            with np.errstate(all="ignore"):
                upper = p * x + (r * np.log(np.maximum(x, l0)) if r != 0.0 else 0.0)
            return np.where(x >= l0, upper, slope0 + x)

        def inverse(u):
            u = np.asarray(u, dtype=float)
            with np.errstate(divide="ignore"):
                lu = np.log(u)
            lin = np.exp(lu - slope0)
            big = lu > logA0
            out = np.where(u > 0, lin, 0.0)
            if np.any(big):
                tgt = lu[big]
                hi = float(np.max(tgt)) / max(p - 0.5, 0.5) + abs(r) * 10 + l0 + 50.0
                xs = _bisect_log(lambda x: log_eval(x), tgt, l0, hi)
                out = np.where(big, np.exp(np.where(big, 0, 0) + 0.0), out)
                out[big] = np.exp(xs)
            out = np.where(np.isinf(u), INF, out)
            return out

        return cls(log_eval, inverse, PowerLog(p, r), f"t^{p:g} log^{r:g} t", meta={"type": "powerlog", "p": p, "a": r, "kinks": [l0]})

    @classmethod
    def exponential(cls, beta: float) -> "YoungFn":
        """``exp((t0+t)**beta) - exp(t0**beta)``, linear on ``[0, 1]``.

        ``t0 = max(0, ((1-beta)/beta)**(1/beta))`` makes the formula
        convex for every ``beta > 0``.
        """
        if not beta > 0:
            raise ParameterError(f"exponential Young function needs beta > 0, got {beta}")
        t0 = max(0.0, ((1.0 - beta) / beta) ** (1.0 / beta)) if beta < 1.0 else 0.0
        y0 = t0**beta
        g1 = math.exp((t0 + 1.0) ** beta) - math.exp(y0)
        lg1 = math.log(g1)

        def log_eval(x):
            x = np.asarray(x, dtype=float)
            with np.errstate(all="ignore"):
                t = np.exp(x)
                y = (t0 + t) ** beta
                upper = y + np.log1p(-np.exp(y0 - y))
            return np.where(x <= 0.0, lg1 + x, upper)

        def inverse(u):
            u = np.asarray(u, dtype=float)
            with np.errstate(all="ignore"):
                big = u > g1
                lin = u / g1
                # log(u + e^{y0}) without overflow
                lu = np.logaddexp(np.log(np.where(big, u, 1.0)), y0)
                upper = lu ** (1.0 / beta) - t0
            return np.where(big, upper, np.maximum(lin, 0.0))

        return cls(log_eval, inverse, Exponential(beta), f"exp(t^{beta:g})", meta={"type": "exp", "beta": beta, "kinks": [0.0]})

    @classmethod
    def linfinity(cls) -> "YoungFn":
        """``A(t) = 0`` on ``[0, 1]`` and ``inf`` beyond."""
        return cls(
            lambda x: np.where(x <= 0.0, -INF, INF),
            lambda u: np.ones(np.shape(u)),
            LInfinity(),
            "Linf",
            eval_fn=lambda t: np.where(t <= 1.0, 0.0, INF),
            meta={"type": "linf"},
        )

    @classmethod
    def from_callable(cls, func: Callable, asymptote: Asymptote, name: str = "custom") -> "YoungFn":
        """Wrap a vectorized convex ``func`` with a numeric inverse."""

        def log_eval(x):
            with np.errstate(all="ignore"):
                return np.log(func(np.exp(x)))

        def inverse(u):
            u = np.asarray(u, dtype=float)
            with np.errstate(divide="ignore"):
                lu = np.log(u)
            pos = u > 0
            out = np.zeros(u.shape)
            if np.any(pos):
                xs = _bisect_log(log_eval, lu[pos], -800.0, 800.0)
                out[pos] = np.exp(xs)
            return out

        return cls(log_eval, inverse, asymptote, name, eval_fn=func, meta={"type": "callable"})

    @classmethod
    def from_json(cls, spec: dict) -> "YoungFn":
        kind = spec.get("type")
        if kind == "power":
            return cls.power(float(spec["p"]))
        if kind == "powerlog":
            return cls.powerlog(float(spec["p"]), float(spec.get("a", 0.0)))
        if kind == "exp":
            return cls.exponential(float(spec["beta"]))
        if kind == "linf":
            return cls.linfinity()
        raise ParseError(f"unknown Young function type {kind!r} (rule: power|powerlog|exp|linf)")


def dominates_near_infinity(A: YoungFn, B: YoungFn) -> bool:
    """Does ``A`` dominate ``B`` near infinity?

    Decided on the descriptors: ``LInfinity`` dominates everything,
    exponentials beat power-logs, and within a family the parameters are
    compared lexicographically.
    """
    return _rank(A.asymptote) >= _rank(B.asymptote)


def equivalent_near_infinity(A: YoungFn, B: YoungFn) -> bool:
    return dominates_near_infinity(A, B) and dominates_near_infinity(B, A)


def delta2(A: YoungFn) -> bool:
    """``A(2t) <= K A(t)`` for large ``t``; true exactly for power-log growth."""
    return isinstance(A.asymptote, PowerLog)


def delta2_samples(A: YoungFn, lo: float = 1.0, hi: float = 1e6, n: int = 200) -> np.ndarray:
    """``log(A(2t)/A(t))`` sampled on ``[lo, hi]`` (a numeric cross-check)."""
    x = np.linspace(math.log(lo), math.log(hi), n)
    return np.asarray(A.log_eval(x + LOG2)) - np.asarray(A.log_eval(x))


# --------------------------------------------------------------------------
# fundamental functions


class ConcaveMajorant:
    """Least concave majorant of a fundamental function.

    ``exact`` holds the function itself when it is already concave (a
    ``PowLogFn``); otherwise the majorant is the piecewise linear upper
    hull of the node pairs together with ``(0, phi(0+))``.
    """

    def __init__(self, phi: "FundamentalFn", grid: Grid):
        self.at0 = phi.at0
        self.exact = None
        if isinstance(phi.phi, PowLogFn) and _is_concave_powlog(phi.phi, grid):
            self.exact = phi.phi
            t = grid.nodes
            self.vertices = (np.concatenate([[0.0], t]), np.concatenate([[self.at0], phi(t)]))
            return
        t = grid.nodes
        x = np.concatenate([[0.0], t])
        y = np.concatenate([[self.at0], np.asarray(phi(t), dtype=float)])
        idx = kernels.upper_hull(x, y)
        self.vertices = (x[idx], y[idx])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.exact is not None:
            out = np.where(t > 0, self.exact(np.where(t > 0, t, 1.0)), self.at0)
        else:
            xs, ys = self.vertices
            out = np.interp(t, xs, ys)
        return out if out.ndim else float(out)


def _is_concave_powlog(phi: PowLogFn, grid: Grid) -> bool:
    if phi.support != 1.0:
        return False
    d2 = phi.derivative().derivative()
    t = np.concatenate([np.geomspace(1e-150, grid.nodes[0], 200), grid.nodes])
    vals = np.asarray(d2(t))
    scale = np.abs(np.asarray(phi(t))) / t**2
    return bool(np.all(vals <= 1e-10 * scale))


class FundamentalFn:
    """Quasiconcave function on (0, 1], with its least concave majorant.

    Parameters
    ----------
    phi : PowLogFn or GridFn
        The function.
    grid : Grid, optional
        Nodes used for checks and for the hull.
    at0 : float, optional
        ``phi(0+)``; computed from the atoms for a ``PowLogFn`` and taken
        as 0 for a ``GridFn`` unless given.
    check : bool
        Raise ``DomainError`` if ``phi`` is not quasiconcave.
    """

    def __init__(self, phi: Union[PowLogFn, GridFn], grid: Grid | None = None, at0: float | None = None, check: bool = True, label: str | None = None):
        self.phi = phi
        self.grid = grid or (phi.grid if isinstance(phi, GridFn) else default_grid())
        if at0 is None:
            at0 = phi.limit0() if isinstance(phi, PowLogFn) else 0.0
        self.at0 = float(at0)
        self.label = label or (str(phi) if isinstance(phi, PowLogFn) else "sampled")
        if check and not self.is_quasiconcave_equiv():
            raise DomainError(f"{self.label} is not equivalent to a quasiconcave function")
        self._majorant = None

    def __call__(self, t):
        return self.phi(t)

    @property
    def majorant(self) -> ConcaveMajorant:
        if self._majorant is None:
            self._majorant = ConcaveMajorant(self, self.grid)
        return self._majorant

    def values(self, grid: Grid | None = None) -> np.ndarray:
        g = grid or self.grid
        return np.asarray(self.phi(g.nodes), dtype=float)

    def is_quasiconcave(self, grid: Grid | None = None) -> bool:
        t = (grid or self.grid).nodes
        v = np.asarray(self.phi(t), dtype=float)
        if np.any(~(v > 0)):
            return False
        inc = np.all(np.diff(v) >= -1e-12 * v[1:])
        r = t / v
        inc2 = np.all(np.diff(r) >= -1e-12 * r[1:])
        return bool(inc and inc2)

    def is_quasiconcave_equiv(self, grid: Grid | None = None, const: float = 4.0) -> bool:
        """Quasiconcave up to a multiplicative constant.

        Closed-form weights such as ``t**(1/2) / log(2/t)`` are only
        equivalent to quasiconcave functions; this checks that ``phi`` and
        ``t/phi`` never drop below ``1/const`` times their running maximum.
        """
        t = (grid or self.grid).nodes
        v = np.asarray(self.phi(t), dtype=float)
        if np.any(~(v > 0)):
            return False
        r = t / v
        drop1 = np.max(np.maximum.accumulate(v) / v)
        drop2 = np.max(np.maximum.accumulate(r) / r)
        return bool(drop1 <= const and drop2 <= const)

    def log_at_u(self, u):
        """``log phi(2 e^{-u})`` for any ``u >= log 2``."""
        u = np.asarray(u, dtype=float)
        if isinstance(self.phi, PowLogFn):
            return self.phi.log_at_u(u)
        g = self.phi.grid
        lv = np.log(self.phi.values)
        # log-log linear extrapolation below t_min
        slope = (lv[1] - lv[0]) / (g.u[1] - g.u[0])
        inside = np.interp(u, g.u[::-1], lv[::-1])
        return np.where(u > g.u[0], lv[0] + slope * (u - g.u[0]), inside)

    def leading(self) -> tuple[float, float]:
        """Exponents ``(a, b)`` with ``phi ~ t**a log(2/t)**b`` near 0."""
        if isinstance(self.phi, PowLogFn):
            _, a, b = self.phi.leading()
            return a, b
        g = self.phi.grid
        sel = g.nodes <= 1e-3
        u = g.u[sel]
        y = np.log(self.phi.values[sel])
        X = np.column_stack([np.ones_like(u), LOG2 - u, np.log(u)])
        coef, *_ = np.linalg.lstsq(X, y, rcond=None)
        a = float(np.round(coef[1], 3))
        # a fit within 0.01 outside [0, 1] is fitting noise, e.g. log(1 + 1/t) against log(2/t)
        if -0.01 <= a < 0.0 or 1.0 < a <= 1.01:
            a = min(max(a, 0.0), 1.0)
            # refit the log exponent with the power held at the snapped value
            coef2, *_ = np.linalg.lstsq(X[:, [0, 2]], y - a * (LOG2 - u), rcond=None)
            return a, float(np.round(coef2[1], 3))
        return a, float(np.round(coef[2], 3))

    def describe(self) -> dict:
        return {"phi": self.label}


def _as_fundamental(phi) -> FundamentalFn:
    if isinstance(phi, FundamentalFn):
        return phi
    if isinstance(phi, (PowLogFn, GridFn)):
        return FundamentalFn(phi)
    raise TypeError(f"expected a fundamental function, got {type(phi).__name__}")


# --------------------------------------------------------------------------
# space specifications


@dataclass(frozen=True)
class Lebesgue:
    p: float

    def describe(self) -> str:
        return f"L:{_pf(self.p)}"


@dataclass(frozen=True)
class Lorentz:
    p: float
    q: float

    def describe(self) -> str:
        return f"Lor:{_pf(self.p)},{_pf(self.q)}"


@dataclass(frozen=True)
class LorentzZygmund:
    p: float
    q: float
    zeta: float

    def describe(self) -> str:
        return f"LZ:{_pf(self.p)},{_pf(self.q)},{_pf(self.zeta)}"


@dataclass(frozen=True, eq=False)
class Orlicz:
    A: YoungFn
    label: str = ""

    def describe(self) -> str:
        return self.label or f"Orlicz:{self.A.name}"


@dataclass(frozen=True, eq=False)
class Lambda:
    phi: FundamentalFn

    def describe(self) -> str:
        return f"Lambda:{self.phi.label}"


@dataclass(frozen=True, eq=False)
class Marcinkiewicz:
    phi: FundamentalFn

    def describe(self) -> str:
        return f"Marc:{self.phi.label}"


SpaceSpec = Union[Lebesgue, Lorentz, LorentzZygmund, Orlicz, Lambda, Marcinkiewicz]


def _pf(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:g}"


def exp_space(beta: float) -> Orlicz:
    return Orlicz(YoungFn.exponential(beta), f"expL:{_pf(beta)}")


def llogl_space(p: float, a: float) -> Orlicz:
    return Orlicz(YoungFn.powerlog(p, a), f"LlogL:{_pf(p)},{_pf(a)}")


def parse_space(text: str, base_dir: str | None = None) -> SpaceSpec:
    """Parse the space mini-language.

    ``L:p | Lor:p,q | LZ:p,q,zeta | expL:beta | LlogL:p,a |
    Orlicz:<file> | Lambda:<phi> | Marc:<phi>``; ``inf`` denotes
    infinity and ``alpha=`` is accepted as an alias of ``zeta=``.
    """
    tag, sep, rest = text.strip().partition(":")
    if not sep:
        raise ParseError(f"token {text!r} lacks ':' (rule: space := tag ':' args)")
    args = [a.strip() for a in rest.split(",")] if tag in ("L", "Lor", "LZ", "expL", "LlogL") else [rest.strip()]
    rule = {
        "L": "L:p", "Lor": "Lor:p,q", "LZ": "LZ:p,q,zeta", "expL": "expL:beta", "LlogL": "LlogL:p,a",
    }
    if tag in rule:
        want = rule[tag].count(",") + 1
        if len(args) != want:
            raise ParseError(f"token {text!r} needs {want} argument(s) (rule: {rule[tag]})")
        vals = []
        for a in args:
            key, eq, val = a.partition("=")
            if eq:
                if key.strip() not in ("zeta", "alpha"):
                    raise ParseError(f"token {a!r}: only zeta= (alias alpha=) is named (rule: {rule[tag]})")
                a = val
            vals.append(_num(a, rule[tag]))
        if tag == "L":
            return Lebesgue(vals[0])
        if tag == "Lor":
            return Lorentz(vals[0], vals[1])
        if tag == "LZ":
            return LorentzZygmund(vals[0], vals[1], vals[2])
        if tag == "expL":
            return exp_space(vals[0])
        return llogl_space(vals[0], vals[1])
    if tag == "Orlicz":
        path = args[0]
        if base_dir and not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"token {args[0]!r}: cannot read Young function file (rule: Orlicz:<file>)") from exc
        return Orlicz(YoungFn.from_json(data), f"Orlicz:{args[0]}")
    if tag in ("Lambda", "Marc"):
        phi = FundamentalFn(parse_powlog(args[0]))
        return Lambda(phi) if tag == "Lambda" else Marcinkiewicz(phi)
    raise ParseError(f"unknown space tag {tag!r} (rule: L|Lor|LZ|expL|LlogL|Orlicz|Lambda|Marc)")


def validate_spec(s: SpaceSpec) -> bool:
    """Admissibility conditions (L1)-(L3) and (Z1)-(Z4)."""
    if isinstance(s, Lebesgue):
        return s.p >= 1.0
    if isinstance(s, Lorentz):
        p, q = s.p, s.q
        return (1 < p < INF and 1 <= q <= INF) or (p == 1 and q == 1) or (p == INF and q == INF)
    if isinstance(s, LorentzZygmund):
        p, q, z = s.p, s.q, s.zeta
        if not math.isfinite(z):
            return False
        if 1 < p < INF and 1 <= q <= INF:
            return True
        if p == 1 and q == 1:
            return z >= 0
        if p == INF and q == INF:
            return z <= 0
        if p == INF and 1 <= q < INF:
            return z + 1.0 / q < 0
        return False
    if isinstance(s, Orlicz):
        return isinstance(s.A, YoungFn)
    if isinstance(s, (Lambda, Marcinkiewicz)):
        return s.phi.is_quasiconcave_equiv()
    return False


def is_norm(s: SpaceSpec) -> bool:
    """True when the functional is a norm rather than a quasinorm."""
    if isinstance(s, Lorentz):
        return s.q <= s.p
    if isinstance(s, LorentzZygmund):
        p, q, z = s.p, s.q, s.zeta
        if p == 1 and q == 1:
            return True
        return q <= p and z >= 0 and p < INF
    return True


# --------------------------------------------------------------------------
# norms


def _inv(x: float) -> float:
    return 0.0 if math.isinf(x) else 1.0 / x


def _root(x: float, q: float) -> float:
    return x ** (1.0 / q) if math.isfinite(x) else INF


def norm(s: SpaceSpec, f: Function, grid: Grid | None = None) -> float:
    """Norm (or quasinorm) of ``f`` in the space ``s``.

    Parameters
    ----------
    s : SpaceSpec
        Admissible space.
    f : PowLogFn, GridFn or StepFn
        Function on (0, 1).
    grid : Grid, optional
        Grid for sampling non-monotone ``PowLogFn`` inputs.

    Returns
    -------
    float
        The norm; ``inf`` when divergent.
    """
    if not validate_spec(s):
        raise SpecError(f"inadmissible space {s!r}")
    prof = profile_of(f, grid)
    return _norm_profile(s, prof)


def _norm_profile(s: SpaceSpec, prof) -> float:
    if prof.empty:
        return 0.0
    if isinstance(s, Lebesgue):
        if math.isinf(s.p):
            return prof.ess_sup()
        return _root(prof.weighted_integral(s.p, 0.0, 0.0), s.p)
    if isinstance(s, (Lorentz, LorentzZygmund)):
        p, q = s.p, s.q
        z = s.zeta if isinstance(s, LorentzZygmund) else 0.0
        ip = _inv(p)
        if math.isinf(q):
            return prof.weighted_sup(ip, z)
        return _root(prof.weighted_integral(q, q * ip - 1.0, q * z), q)
    if isinstance(s, Orlicz):
        return _luxemburg_profile(s.A, prof)
    if isinstance(s, Lambda):
        return prof.stieltjes(s.phi.majorant)
    if isinstance(s, Marcinkiewicz):
        extra = s.phi.grid.nodes
        return prof.maximal_sup(s.phi, extra)
    raise SpecError(f"unknown space {s!r}")


def luxemburg_norm(A: YoungFn, f: Function, grid: Grid | None = None) -> float:
    """``inf{lam > 0 : int A(f*/lam) <= 1}``.

    Bracket by doubling or halving from ``lam = 1`` and refine with 60
    bisection steps.
    """
    return _luxemburg_profile(A, profile_of(f, grid))


def _luxemburg_profile(A: YoungFn, prof) -> float:
    if prof.empty:
        return 0.0
    if isinstance(A.asymptote, LInfinity):
        return prof.ess_sup()
    F = lambda lam: prof.young_integral(A, lam)
    lam = 1.0
    if F(lam) > 1.0:
        lo = lam
        for _ in range(2100):
            hi = lo * 2.0
            if math.isinf(hi):
                return INF
            if F(hi) <= 1.0:
                break
            lo = hi
        else:
            return INF
    else:
        hi = lam
        for _ in range(2100):
            lo = hi / 2.0
            if lo == 0.0:
                return 0.0
            if F(lo) > 1.0:
                break
            hi = lo
        else:
            return 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if F(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return hi


# --------------------------------------------------------------------------
# fundamental functions of spaces


def fundamental(s: SpaceSpec, grid: Grid | None = None) -> FundamentalFn:
    """Fundamental function, in closed form where one is known.

    Lebesgue and Lorentz: ``t**(1/p)``; Lorentz-Zygmund: ``t**(1/p)
    log(2/t)**zeta`` under (Z1)/(Z2) and ``log(2/t)**(zeta + 1/q)`` under
    (Z3)/(Z4); Orlicz: ``1/A^{-1}(1/t)`` sampled on the grid;
    Lambda/Marcinkiewicz: ``phi``.
    """
    if not validate_spec(s):
        raise SpecError(f"inadmissible space {s!r}")
    grid = grid or default_grid()
    if isinstance(s, (Lebesgue, Lorentz)):
        return FundamentalFn(PowLogFn([(1.0, _inv(s.p), 0.0)]), grid, label=f"t^{_pf(_inv(s.p))}")
    if isinstance(s, LorentzZygmund):
        if math.isinf(s.p):
            e = s.zeta + _inv(s.q)
            return FundamentalFn(PowLogFn([(1.0, 0.0, e)]), grid, label=f"log^{_pf(e)}")
        return FundamentalFn(PowLogFn([(1.0, _inv(s.p), s.zeta)]), grid, label=f"t^{_pf(_inv(s.p))} log^{_pf(s.zeta)}")
    if isinstance(s, Orlicz):
        t = grid.nodes
        vals = 1.0 / np.asarray(s.A.inverse(1.0 / t), dtype=float)
        at0 = 1.0 if isinstance(s.A.asymptote, LInfinity) else 0.0
        return FundamentalFn(GridFn(grid, vals), grid, at0=at0, label=f"1/A^-1(1/t) for {s.describe()}")
    if isinstance(s, (Lambda, Marcinkiewicz)):
        return s.phi
    raise SpecError(f"unknown space {s!r}")


def fundamental_numeric(s: SpaceSpec, grid: Grid | None = None) -> GridFn:
    """``norm(s, chi_(0, t))`` at every node."""
    grid = grid or default_grid()
    vals = [norm(s, StepFn.indicator(0.0, float(t))) if t < 1.0 else norm(s, StepFn([0.0, 1.0], [1.0])) for t in grid.nodes]
    return GridFn(grid, vals)


def _descriptor_from_exponents(a: float, b: float) -> Asymptote:
    if a < 0 or a > 1 + 1e-12:
        raise DomainError(f"t^{a} log^{b} is not quasiconcave near 0")
    if abs(a) <= 1e-9:
        if abs(b) <= 1e-9:
            return LInfinity()
        if b < 0:
            return Exponential(-1.0 / b)
        raise DomainError("log^b with b > 0 is not a fundamental function")
    p = 1.0 / a
    return PowerLog(p, b * p)


def fundamental_orlicz(phi) -> YoungFn:
    """Young function of the Orlicz space on the level of ``phi``.

    Builds ``A_raw(t) = 1/phi^{-1}(1/t)`` (so ``A_raw^{-1}(u) = 1/phi(1/u)``
    for ``u >= 1``, linear below) and returns its convex regularization
    ``A(t) = int_0^t A_raw(s)/s ds``, which satisfies
    ``A_raw(t/2) <= A(t) <= A_raw(t)``.  Its fundamental function is
    therefore within a factor 2 of ``phi``.
    """
    phi = _as_fundamental(phi)
    a, b = phi.leading()
    desc = _descriptor_from_exponents(a, b)
    if isinstance(phi.phi, PowLogFn):
        u = np.arange(LOG2, 820.0, 0.01)
    else:
        u = phi.phi.grid.u[::-1].copy()
    X = -np.asarray(phi.log_at_u(u), dtype=float)  # log t along the curve
    X = np.maximum.accumulate(X)
    logA_raw = u - LOG2
    dX = np.diff(X)
    with np.errstate(divide="ignore"):
        inc = np.log(dX) + np.logaddexp(logA_raw[:-1], logA_raw[1:]) - LOG2
    logA = np.concatenate([[0.0], np.logaddexp.accumulate(np.concatenate([[0.0], inc]))[1:]])
    keep = np.concatenate([dX > 0, [True]])
    keep[0] = True
    X, logA = X[keep], logA[keep]
    x_end, l_end = float(X[-1]), float(logA[-1])
    x1 = float(X[0])  # log of t1 = 1/phi(1)

    def log_eval(x):
        x = np.asarray(x, dtype=float)
        inside = np.interp(x, X, logA)
        lin = x - x1
        beyond = _extrapolate(desc, x, x_end, l_end, X, logA)
        return np.where(x <= x1, lin, np.where(x <= x_end, inside, beyond))

    def inverse(uu):
        uu = np.asarray(uu, dtype=float)
        with np.errstate(divide="ignore"):
            lu = np.log(uu)
        inside = np.interp(lu, logA, X)
        lin = lu + x1
        out = np.where(lu <= 0.0, lin, inside)
        if np.any(lu > l_end):
            big = lu > l_end
            hi = x_end + 10.0
            while float(np.max(_extrapolate(desc, np.array([hi]), x_end, l_end, X, logA))) < float(np.max(lu[big])):
                hi = x_end + 2.0 * (hi - x_end)
                if hi > 1e6:
                    break
            xs = _bisect_log(lambda x: _extrapolate(desc, x, x_end, l_end, X, logA), lu[big], x_end, hi)
            out = out.copy()
            out[big] = xs
        res = np.where(uu > 0, np.exp(out), 0.0)
        return np.where(np.isinf(uu), INF, res)

    return YoungFn(log_eval, inverse, desc, f"fundamental Orlicz of {phi.label}", meta={"type": "table", "x1": x1, "kinks": [x1]})


def _extrapolate(desc, x, x_end, l_end, X, logA):
    x = np.asarray(x, dtype=float)
    if isinstance(desc, LInfinity):
        return np.where(x > x_end, INF, l_end)
    if isinstance(desc, PowerLog):
        with np.errstate(all="ignore"):
            corr = desc.a * (np.log(np.maximum(x, 1e-300)) - math.log(max(x_end, 1e-300))) if x_end > 0 else 0.0
        return l_end + desc.p * (x - x_end) + corr
    # exponential: log A ~ t^beta
    with np.errstate(over="ignore"):
        return l_end + np.exp(desc.beta * x) - math.exp(desc.beta * x_end)


def endpoint_spaces(phi) -> tuple[Lambda, Marcinkiewicz]:
    """``(Lambda_phi, M_phi)``: smallest and largest spaces on the level."""
    phi = _as_fundamental(phi)
    return Lambda(phi), Marcinkiewicz(phi)


# --------------------------------------------------------------------------
# Orlicz membership


@dataclass
class MembershipReport:
    member: Optional[bool]
    verdict: str
    u_edges: list
    integrals: list

    def to_dict(self) -> dict:
        return {
            "member": self.member,
            "verdict": self.verdict,
            "t_min": [2.0 * math.exp(-u) if u < 700 else 0.0 for u in self.u_edges],
            "u": self.u_edges,
            "integrals": self.integrals,
        }


def orlicz_membership(A: YoungFn, f: PowLogFn, decades: int = 12) -> MembershipReport:
    """Decide ``int_0^1 A(f) < inf`` from truncated integrals.

    The truncation point ``t_min = 2 exp(-u)`` is pushed down through
    ``u = 1, 10, 100, ..., 10**decades``, i.e. one decade of ``log(2/t)``
    per step, with every integral taken in log space.  Member when the
    last step changes the value by less than 1%; non-member when each of
    the last three steps adds at least 5%; inconclusive otherwise.
    """
    if not delta2(A):
        raise PreconditionError(f"{A.name} fails the Delta_2 condition")
    from scipy import integrate as spi

    edges = [math.log(2.0 / f.support)] + [10.0**k for k in range(0, decades + 1) if 10.0**k > math.log(2.0 / f.support)]

    def integrand(v):
        u = math.exp(v)
        with np.errstate(all="ignore"):
            lf = float(f.log_at_u(np.asarray(u)))
        if math.isnan(lf):
            return 0.0
        return math.exp(float(A.log_eval(lf)) + LOG2 - u + v)

    cum = []
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", spi.IntegrationWarning)
            val, _ = spi.quad(integrand, math.log(lo), math.log(hi), epsabs=0.0, epsrel=1e-11, limit=400)
        total += val
        cum.append(total)
    rel = [abs(cum[i] - cum[i - 1]) / cum[i] if cum[i] > 0 else 0.0 for i in range(1, len(cum))]
    if math.isinf(total) or any(math.isinf(x) for x in cum):
        member, verdict = False, "diverging"
    elif rel and rel[-1] < 0.01:
        member, verdict = True, "stabilized"
    elif len(rel) >= 3 and all(r >= 0.05 for r in rel[-3:]):
        member, verdict = False, "diverging"
    else:
        member, verdict = None, "inconclusive"
    return MembershipReport(member, verdict, edges[1:], cum)
