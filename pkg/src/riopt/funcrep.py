"""Function representations on (0, 1).

Three concrete types live here:

``PowLogFn``
    finite sums of atoms ``c * t**a * log(2/t)**b``, optionally cut off
    at a support point ``s`` (the function vanishes on ``(s, 1]``).
``GridFn``
    samples on a logarithmic grid, read as the piecewise-linear
    interpolant in ``u = log(2/t)`` and as a constant below ``t_min``.
``StepFn``
    piecewise constant functions on an arbitrary partition of (0, 1].

All grids are uniform in ``u``; behavior near zero is what matters, so
nothing here ever uses a grid that is linear in ``t``.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence, Union

import numpy as np
from scipy import integrate as _spi
from scipy import optimize as _spo

from .errors import DomainError, ParameterError, ParseError, RangeError

LOG2 = math.log(2.0)
DEFAULT_T_MIN = 1e-30
DEFAULT_PPD = 64
GRID_ENV = "RIOPT_GRID"

_EXP_TOL = 1e-12
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _same(x: float, y: float) -> bool:
    return abs(x - y) <= _EXP_TOL


# --------------------------------------------------------------------------
# grids


@dataclass(frozen=True, eq=False)
class Grid:
    """Logarithmic grid on ``[t_min, 1]``, uniform in ``u = log(2/t)``.

    Attributes
    ----------
    t_min : float
        Smallest node.
    points_per_decade : int
        Resolution.
    nodes : ndarray
        Increasing nodes, the last one equal to 1.
    """

    t_min: float
    points_per_decade: int
    nodes: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    @cached_property
    def u(self) -> np.ndarray:
        return np.log(2.0 / self.nodes)

    @cached_property
    def h(self) -> float:
        """Constant cell width in ``u``."""
        return float(math.log(self.nodes[1] / self.nodes[0]))

    def cell_moments(self, c: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
        """Exact cell weights for ``int f(t) t**(c-1) dt``.

        For the cell between nodes ``j`` and ``j+1`` the integral of the
        linear-in-``u`` interpolant equals ``f[j]*wl[j] + f[j+1]*wr[j]``.
        """
        key = float(c)
        cache = self.__dict__.setdefault("_moments", {})
        if key not in cache:
            cache[key] = _cell_moments(self.nodes, key)
        return cache[key]

    @cached_property
    def measures(self) -> np.ndarray:
        """Dual-cell measures: ``integrate(f) = sum(f * measures)``.

        Node 0 also carries the tail ``(0, t_min)``.
        """
        wl, wr = self.cell_moments(1.0)
        m = np.zeros(self.size)
        m[:-1] += wl
        m[1:] += wr
        m[0] += self.nodes[0]
        return m

    @cached_property
    def cell_breaks(self) -> np.ndarray:
        """Boundaries of the dual cells, from 0 to 1."""
        b = np.concatenate([[0.0], np.cumsum(self.measures)])
        b[-1] = 1.0
        return b

    def describe(self) -> dict:
        return {"t_min": self.t_min, "points_per_decade": self.points_per_decade, "nodes": self.size}


def _expo_moments(c: float, h: np.ndarray | float) -> tuple[np.ndarray, np.ndarray]:
    """Return ``int_0^h e^{-cx} dx`` and ``int_0^h x e^{-cx} dx``."""
    h = np.asarray(h, dtype=float)
    y = c * h
    if abs(c) < 1e-14:
        return h.copy(), h * h / 2.0
    e0 = -np.expm1(-y) / c
    small = np.abs(y) < 1e-3
    # 1 - (1+y)e^{-y} has a cancellation for small y; use the series there
    core = np.where(small, y * y / 2.0 - y**3 / 3.0 + y**4 / 8.0, -np.expm1(-y) - y * np.exp(-y))
    e1 = core / (c * c)
    return e0, e1


def _cell_moments(nodes: np.ndarray, c: float) -> tuple[np.ndarray, np.ndarray]:
    t_hi = nodes[1:]
    h = np.log(nodes[1:] / nodes[:-1])
    e0, e1 = _expo_moments(c, h)
    scale = t_hi**c
    wl = scale * e1 / h
    wr = scale * (e0 - e1 / h)
    return wl, wr


def node_count(t_min: float, points_per_decade: int) -> int:
    decades = math.log10(1.0 / t_min)
    raw = points_per_decade * decades
    if abs(raw - round(raw)) < 1e-9:
        raw = round(raw)
    return int(math.ceil(raw)) + 1


@lru_cache(maxsize=64)
def _grid_cached(t_min: float, points_per_decade: int) -> Grid:
    n = node_count(t_min, points_per_decade)
    nodes = np.geomspace(t_min, 1.0, n)
    nodes[0] = t_min
    nodes[-1] = 1.0
    nodes.flags.writeable = False
    return Grid(float(t_min), int(points_per_decade), nodes)


def make_log_grid(t_min: float = DEFAULT_T_MIN, points_per_decade: int = DEFAULT_PPD) -> Grid:
    """Build the logarithmic grid on ``[t_min, 1]``.

    Parameters
    ----------
    t_min : float
        Smallest node, in ``(0, 1e-3]``.
    points_per_decade : int
        Positive number of nodes per decade.

    Returns
    -------
    Grid
        ``ceil(points_per_decade * log10(1/t_min)) + 1`` nodes.
    """
    if not (0.0 < t_min <= 1e-3) or not math.isfinite(t_min):
        raise ParameterError(f"t_min must lie in (0, 1e-3], got {t_min!r}")
    if int(points_per_decade) != points_per_decade or points_per_decade < 1:
        raise ParameterError(f"points_per_decade must be a positive integer, got {points_per_decade!r}")
    return _grid_cached(float(t_min), int(points_per_decade))


def grid_from_env() -> tuple[float, int]:
    """Default ``(t_min, points_per_decade)``, overridable by ``RIOPT_GRID``.

    The variable holds ``t_min,points_per_decade``, e.g. ``1e-20,32``.
    """
    raw = os.environ.get(GRID_ENV, "").strip()
    if not raw:
        return DEFAULT_T_MIN, DEFAULT_PPD
    try:
        a, b = raw.split(",")
        return float(a), int(b)
    except ValueError as exc:
        raise ParameterError(f"{GRID_ENV} must look like '1e-30,64', got {raw!r}") from exc


def default_grid() -> Grid:
    t_min, ppd = grid_from_env()
    return make_log_grid(t_min, ppd)


def grid_from_nodes(nodes: Sequence[float]) -> Grid:
    """Recover a ``Grid`` from explicit nodes (e.g. read from CSV)."""
    t = np.asarray(nodes, dtype=float)
    if t.ndim != 1 or t.size < 2 or not np.all(np.diff(t) > 0):
        raise ParameterError("grid nodes must be strictly increasing")
    if abs(t[-1] - 1.0) > 1e-12:
        raise ParameterError("the last grid node must be 1")
    ratios = t[1:] / t[:-1]
    if np.max(np.abs(ratios / ratios[0] - 1.0)) > 1e-9:
        raise ParameterError("grid nodes are not logarithmically spaced")
    ppd = (t.size - 1) / math.log10(1.0 / t[0])
    if abs(ppd - round(ppd)) > 1e-6:
        raise ParameterError("grid resolution is not an integer number of points per decade")
    return make_log_grid(float(t[0]), int(round(ppd)))


# --------------------------------------------------------------------------
# power-log atoms


def _log2t(t):
    return np.log(2.0 / t)


class PowLogFn:
    """Finite sum of atoms ``c * t**a * log(2/t)**b`` on ``(0, support)``.

    Parameters
    ----------
    atoms : iterable of (c, a, b)
        Coefficient, power exponent and log exponent.  Zero coefficients
        are dropped and duplicate ``(a, b)`` pairs merged.
    support : float, optional
        The function is zero on ``(support, 1]``.  Defaults to 1.
    """

    __slots__ = ("atoms", "support")

    def __init__(self, atoms: Iterable[Sequence[float]], support: float = 1.0):
        merged: dict[tuple[float, float], float] = {}
        for item in atoms:
            c, a, b = (float(x) for x in item)
            if not all(math.isfinite(x) for x in (c, a, b)):
                raise ParameterError(f"atom ({c}, {a}, {b}) is not finite")
            key = (a, b)
            merged[key] = merged.get(key, 0.0) + c
        self.atoms = tuple(sorted(((c, a, b) for (a, b), c in merged.items() if c != 0.0), key=lambda x: (x[1], x[2])))
        if not (0.0 < support <= 1.0):
            raise ParameterError(f"support must lie in (0, 1], got {support!r}")
        self.support = float(support)

    # construction helpers ------------------------------------------------
    @classmethod
    def atom(cls, c: float = 1.0, a: float = 0.0, b: float = 0.0, support: float = 1.0) -> "PowLogFn":
        return cls([(c, a, b)], support)

    @classmethod
    def constant(cls, c: float, support: float = 1.0) -> "PowLogFn":
        return cls([(c, 0.0, 0.0)], support)

    @classmethod
    def indicator(cls, a: float) -> "PowLogFn":
        """``chi_(0, a)``."""
        return cls([(1.0, 0.0, 0.0)], a)

    @classmethod
    def parse(cls, text: str) -> "PowLogFn":
        return parse_powlog(text)

    # algebra -------------------------------------------------------------
    def _check_support(self, other: "PowLogFn") -> float:
        if not _same(self.support, other.support):
            raise DomainError("power-log sums need a common support")
        return self.support

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = PowLogFn.constant(float(other), self.support) if other else PowLogFn([], self.support)
        s = self._check_support(other)
        return PowLogFn(self.atoms + other.atoms, s)

    __radd__ = __add__

    def __neg__(self):
        return PowLogFn([(-c, a, b) for c, a, b in self.atoms], self.support)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return PowLogFn([(c * other, a, b) for c, a, b in self.atoms], self.support)
        s = min(self.support, other.support)
        return PowLogFn(
            [(c1 * c2, a1 + a2, b1 + b2) for c1, a1, b1 in self.atoms for c2, a2, b2 in other.atoms], s
        )

    __rmul__ = __mul__

    def restrict(self, support: float) -> "PowLogFn":
        return PowLogFn(self.atoms, min(self.support, support))

    def derivative(self) -> "PowLogFn":
        """Derivative on ``(0, support)``."""
        out = []
        for c, a, b in self.atoms:
            if a != 0.0:
                out.append((c * a, a - 1.0, b))
            if b != 0.0:
                out.append((c * b, a - 1.0, b - 1.0))
        return PowLogFn(out, self.support)

    # evaluation ----------------------------------------------------------
    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        inside = (t > 0) & (t <= self.support)
        if np.any(inside):
            tt = t[inside]
            lg = _log2t(tt)
            acc = np.zeros(tt.shape)
            with np.errstate(over="ignore", invalid="ignore"):
                for c, a, b in self.atoms:
                    acc = acc + c * tt**a * lg**b
            out[inside] = acc
        return out if out.ndim else float(out)

    def log_at_u(self, u):
        """``log f(2 e^{-u})`` for large ``u`` without overflow.

        Valid where the function is positive.
        """
        u = np.asarray(u, dtype=float)
        logs = []
        signs = []
        for c, a, b in self.atoms:
            logs.append(math.log(abs(c)) + a * (LOG2 - u) + b * np.log(u))
            signs.append(1.0 if c > 0 else -1.0)
        if not logs:
            return np.full(u.shape, -np.inf)
        stack = np.vstack([np.broadcast_to(x, u.shape) for x in logs])
        top = np.max(stack, axis=0)
        total = np.zeros(u.shape)
        for lg, sg in zip(stack, signs):
            total = total + sg * np.exp(lg - top)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (top + np.log(total)).reshape(u.shape)

    def leading(self) -> tuple[float, float, float]:
        """The atom dominating as ``t -> 0+`` (smallest ``a``, then largest ``b``)."""
        if not self.atoms:
            return (0.0, 0.0, 0.0)
        best = min(self.atoms, key=lambda x: (x[1], -x[2]))
        return best

    def limit0(self) -> float:
        """``f(0+)`` in the extended reals."""
        c, a, b = self.leading()
        if a < 0 or (a == 0 and b > 0):
            return math.copysign(math.inf, c)
        return sum(c for c, a, b in self.atoms if a == 0 and b == 0)

    def is_nonincreasing(self, grid: Grid | None = None) -> bool:
        grid = grid or default_grid()
        t = grid.nodes[grid.nodes <= self.support]
        if t.size < 2:
            return True
        v = np.asarray(self(t))
        return bool(np.all(np.diff(v) <= 1e-12 * np.maximum(1.0, np.abs(v[:-1]))))

    def is_nonnegative(self, grid: Grid | None = None) -> bool:
        grid = grid or default_grid()
        t = grid.nodes[grid.nodes <= self.support]
        v = np.asarray(self(t))
        return bool(np.all(v >= -1e-14 * np.max(np.abs(v), initial=1.0)))

    def sample(self, grid: Grid | None = None) -> "GridFn":
        grid = grid or default_grid()
        return GridFn(grid, self(grid.nodes))

    # text form -----------------------------------------------------------
    def __str__(self) -> str:
        if not self.atoms:
            return "0*t^0*log^0"
        body = ";".join(f"{_fmt(c)}*t^{_fmt(a)}*log^{_fmt(b)}" for c, a, b in self.atoms)
        return body if self.support == 1.0 else f"{body}|{_fmt(self.support)}"

    def __repr__(self) -> str:
        return f"PowLogFn({str(self)!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PowLogFn) and self.atoms == other.atoms and self.support == other.support

    def __hash__(self) -> int:
        return hash((self.atoms, self.support))


def _fmt(x: float) -> str:
    return repr(float(x)) if x != int(x) or abs(x) > 1e15 else str(int(x))


_ATOM_RE = re.compile(r"^\s*([^*\s]+)\s*\*\s*t\s*\^\s*([^*\s]+)\s*\*\s*log\s*\^\s*([^*\s]+)\s*$")


def _num(token: str, rule: str) -> float:
    tok = token.strip()
    try:
        if tok.lower() in ("inf", "+inf"):
            return math.inf
        if tok.lower() == "-inf":
            return -math.inf
        if "/" in tok:
            p, q = tok.split("/")
            return float(p) / float(q)
        return float(tok)
    except ValueError as exc:
        raise ParseError(f"token {token!r} is not a number (rule: {rule})") from exc


def parse_powlog(text: str) -> PowLogFn:
    """Parse ``c*t^a*log^b;...`` with an optional ``|support`` suffix."""
    body, _, sup = text.partition("|")
    support = _num(sup, "powlog := atoms ['|' support]") if sup.strip() else 1.0
    atoms = []
    for token in body.split(";"):
        if not token.strip():
            continue
        m = _ATOM_RE.match(token)
        if not m:
            raise ParseError(f"token {token.strip()!r} does not match rule atom := c*t^a*log^b")
        atoms.append(tuple(_num(g, "atom := c*t^a*log^b") for g in m.groups()))
    if not atoms:
        raise ParseError(f"no atoms in {text!r} (rule: powlog := atom (';' atom)*)")
    return PowLogFn(atoms, support)


# --------------------------------------------------------------------------
# quadrature of single atoms


def _closed_form(a: float, b: float, lo: float, hi: float) -> float | None:
    """Closed forms for ``b == 0`` or ``a == -1``; ``lo`` may be 0."""
    if b == 0.0:
        if a == -1.0:
            return math.inf if lo == 0.0 else math.log(hi / lo)
        e = a + 1.0
        if lo == 0.0:
            return hi**e / e if e > 0 else math.inf
        return (hi**e - lo**e) / e
    if a == -1.0:
        lhi = math.log(2.0 / hi)
        if b == -1.0:
            return math.inf if lo == 0.0 else math.log(math.log(2.0 / lo)) - math.log(lhi)
        e = b + 1.0
        if lo == 0.0:
            return -(lhi**e) / e if e < 0 else math.inf
        return (math.log(2.0 / lo) ** e - lhi**e) / e
    return None


def quad_powlog(a: float, b: float, lo: float, hi: float) -> float:
    """``int_lo^hi t**a * log(2/t)**b dt``.

    Closed forms are used for ``a == -1`` and ``b == 0``; otherwise the
    integral is taken in ``u = log(2/t)``, where it reads
    ``2**(a+1) * int exp(-(a+1) u) u**b du``.  ``lo = 0`` is allowed and
    gives ``inf`` for divergent integrals.
    """
    if not (0.0 <= lo < hi <= 1.0):
        raise RangeError(f"need 0 <= lo < hi <= 1, got lo={lo!r}, hi={hi!r}")
    cf = _closed_form(a, b, lo, hi)
    if cf is not None:
        return cf
    c = a + 1.0
    if lo == 0.0 and c < 0:
        return math.inf
    u_lo = math.inf if lo == 0.0 else math.log(2.0 / lo)
    u_hi = math.log(2.0 / hi)
    # scale out the value at u_hi to keep the integrand O(1)
    f = lambda u: math.exp(-c * (u - u_hi) + b * math.log(u / u_hi))
    total = 0.0
    if math.isinf(u_lo):
        edges = [u_hi]
        step = max(1.0, 1.0 / max(c, 1e-3))
        x = u_hi
        for _ in range(6):
            x = x + step
            edges.append(x)
            step *= 4.0
        edges.append(math.inf)
    else:
        width = u_lo - u_hi
        pieces = int(min(200, max(1, math.ceil(abs(c) * width / 20.0), math.ceil(width / 50.0))))
        edges = list(np.linspace(u_hi, u_lo, pieces + 1))
    for x0, x1 in zip(edges[:-1], edges[1:]):
        val, _ = _spi.quad(f, x0, x1, epsabs=0.0, epsrel=1e-13, limit=400)
        total += val
    return 2.0**c * math.exp(-c * u_hi) * u_hi**b * total


def powlog_cells(a: float, b: float, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Vectorized ``quad_powlog`` over many intervals with ``lo > 0``.

    Uses closed forms where available and 16-point Gauss-Legendre panels
    in ``u`` otherwise.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if lo.size == 0:
        return np.zeros(0)
    if b == 0.0:
        if a == -1.0:
            return np.log(hi / lo)
        e = a + 1.0
        return (hi**e - lo**e) / e
    if a == -1.0:
        if b == -1.0:
            return np.log(np.log(2.0 / lo)) - np.log(np.log(2.0 / hi))
        e = b + 1.0
        return (np.log(2.0 / lo) ** e - np.log(2.0 / hi) ** e) / e
    c = a + 1.0
    u0 = np.log(2.0 / hi)
    u1 = np.log(2.0 / lo)
    width = u1 - u0
    npan = np.maximum(1, np.ceil(width * max(1.0, abs(c)) / 0.5)).astype(int)
    npan = np.minimum(npan, 4000)
    owner = np.repeat(np.arange(lo.size), npan)
    first = np.concatenate([[0], np.cumsum(npan)[:-1]])
    local = np.arange(owner.size) - first[owner]
    pw = width[owner] / npan[owner]
    left = u0[owner] + local * pw
    mid = left + pw / 2.0
    uu = mid[:, None] + (pw / 2.0)[:, None] * _GL_X[None, :]
    ref = u0[owner][:, None]
    vals = np.exp(-c * (uu - ref) + b * np.log(uu))
    panel = (vals @ _GL_W) * (pw / 2.0)
    out = np.bincount(owner, weights=panel, minlength=lo.size)
    return 2.0**c * np.exp(-c * u0) * out


# --------------------------------------------------------------------------
# sampled and step functions


class GridFn:
    """Samples on a logarithmic grid.

    Between nodes the function is linear in ``u = log(2/t)``; below
    ``t_min`` it is constant, equal to the first sample.  ``+inf``
    samples are allowed and propagate through every integral that
    touches them.
    """

    __slots__ = ("grid", "values", "__dict__")

    def __init__(self, grid: Grid, values):
        v = np.array(values, dtype=float)
        if v.shape != (grid.size,):
            raise ParameterError(f"expected {grid.size} values, got shape {v.shape}")
        if np.any(np.isnan(v)):
            raise ParameterError("GridFn values must not be NaN")
        v.flags.writeable = False
        self.grid = grid
        self.values = v

    @cached_property
    def nonincreasing(self) -> bool:
        v = self.values
        return bool(np.all(v[1:] <= v[:-1]))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        u = np.log(2.0 / np.clip(t, self.grid.t_min, 1.0))
        gu = self.grid.u[::-1]
        gv = self.values[::-1]
        with np.errstate(invalid="ignore"):
            out = np.interp(u, gu, gv)
        if np.any(np.isinf(gv)):
            j = np.clip(np.searchsorted(gu, u), 1, gu.size - 1)
            hit = np.isinf(gv[j]) | np.isinf(gv[j - 1])
            exact = np.isclose(u, gu[j]) & ~np.isinf(gv[j])
            exact |= np.isclose(u, gu[j - 1]) & ~np.isinf(gv[j - 1])
            out = np.where(hit & ~exact, np.inf, out)
        out = np.where(t > 1.0, 0.0, out)
        return out if out.ndim else float(out)

    def abs(self) -> "GridFn":
        return GridFn(self.grid, np.abs(self.values))

    def __mul__(self, k: float) -> "GridFn":
        return GridFn(self.grid, self.values * k)

    __rmul__ = __mul__

    def __add__(self, other: "GridFn") -> "GridFn":
        if other.grid is not self.grid:
            raise ParameterError("GridFn sums need a common grid")
        return GridFn(self.grid, self.values + other.values)

    def to_stepfn(self) -> "StepFn":
        """The step function equal to each sample on its dual cell."""
        return StepFn(self.grid.cell_breaks, self.values)

    def integral(self, lo: float = 0.0, hi: float = 1.0, c: float = 1.0) -> float:
        """``int_lo^hi f(t) t**(c-1) dt`` of the interpolant."""
        return _grid_integral(self, lo, hi, c)


def _grid_integral(fn: GridFn, lo: float, hi: float, c: float = 1.0) -> float:
    g = fn.grid
    t = g.nodes
    v = fn.values
    if lo < 0.0 or hi > 1.0 + 1e-15 or lo >= hi:
        raise RangeError(f"interval [{lo}, {hi}] is outside the grid span (0, 1]")
    hi = min(hi, 1.0)
    total = 0.0
    # tail below t_min
    if lo < t[0]:
        x2 = min(hi, t[0])
        total += v[0] * (x2**c - lo**c) / c if v[0] != 0 else 0.0
        lo = x2
        if lo >= hi:
            return float(total)
    wl, wr = g.cell_moments(c)
    n = t.size
    j0 = min(int(np.searchsorted(t, lo, side="right") - 1), n - 2)
    j1 = min(max(int(np.searchsorted(t, hi, side="left") - 1), 0), n - 2)
    if j0 == j1:
        return float(total + _partial_cell(t, v, j0, lo, hi, c))
    total += _partial_cell(t, v, j0, lo, t[j0 + 1], c)
    total += _partial_cell(t, v, j1, t[j1], hi, c)
    if j1 > j0 + 1:
        cells = slice(j0 + 1, j1)
        with np.errstate(invalid="ignore"):
            part = v[cells] * wl[cells] + v[j0 + 2 : j1 + 1] * wr[cells]
        total += float(np.sum(part))
    return float(total)


def _partial_cell(t, v, j, x1, x2, c):
    """Integral over ``[x1, x2]`` inside cell ``[t_j, t_{j+1}]``."""
    if x2 <= x1:
        return 0.0
    fa, fb = v[j], v[j + 1]
    if np.isinf(fa) or np.isinf(fb):
        return math.inf
    h = math.log(t[j + 1] / t[j])
    # x measured in u from node j+1
    xa = math.log(t[j + 1] / x2)
    xb = math.log(t[j + 1] / x1)
    e0b, e1b = _expo_moments(c, xb)
    e0a, e1a = _expo_moments(c, xa)
    e0 = float(e0b - e0a)
    e1 = float(e1b - e1a)
    return float(t[j + 1] ** c * (fb * (e0 - e1 / h) + fa * e1 / h))


class StepFn:
    """Piecewise constant function on ``(0, 1]``.

    ``values[k]`` holds on ``[breaks[k], breaks[k+1])``.
    """

    __slots__ = ("breaks", "values", "__dict__")

    def __init__(self, breaks, values):
        b = np.array(breaks, dtype=float)
        v = np.array(values, dtype=float)
        if b.ndim != 1 or b.size != v.size + 1:
            raise ParameterError("need len(breaks) == len(values) + 1")
        if b[0] != 0.0 or abs(b[-1] - 1.0) > 1e-12 or np.any(np.diff(b) < 0):
            raise ParameterError("breaks must rise from 0 to 1")
        b[-1] = 1.0
        keep = np.diff(b) > 0
        if not np.all(keep):
            b = np.concatenate([[0.0], b[1:][keep]])
            v = v[keep]
        if np.any(np.isnan(v)):
            raise ParameterError("StepFn values must not be NaN")
        b.flags.writeable = False
        v.flags.writeable = False
        self.breaks = b
        self.values = v

    @classmethod
    def from_cells(cls, values) -> "StepFn":
        v = np.asarray(values, dtype=float)
        return cls(np.linspace(0.0, 1.0, v.size + 1), v)

    @classmethod
    def indicator(cls, lo: float, hi: float, height: float = 1.0) -> "StepFn":
        """``height * chi_(lo, hi)``."""
        pts = sorted({0.0, lo, hi, 1.0})
        vals = [height if (x0 >= lo and x1 <= hi) else 0.0 for x0, x1 in zip(pts[:-1], pts[1:])]
        return cls(pts, vals)

    @property
    def measures(self) -> np.ndarray:
        return np.diff(self.breaks)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        k = np.clip(np.searchsorted(self.breaks, t, side="right") - 1, 0, self.values.size - 1)
        out = np.where((t >= 0) & (t <= 1), self.values[k], 0.0)
        return out if out.ndim else float(out)

    def abs(self) -> "StepFn":
        return StepFn(self.breaks, np.abs(self.values))

    def __mul__(self, k: float) -> "StepFn":
        return StepFn(self.breaks, self.values * k)

    __rmul__ = __mul__

    def refine(self, points) -> "StepFn":
        """Same function on a partition containing ``points``."""
        b = np.union1d(self.breaks, np.clip(np.asarray(points, dtype=float), 0.0, 1.0))
        mids = (b[:-1] + b[1:]) / 2.0
        return StepFn(b, self(mids))

    def __add__(self, other: "StepFn") -> "StepFn":
        b = np.union1d(self.breaks, other.breaks)
        mids = (b[:-1] + b[1:]) / 2.0
        return StepFn(b, self(mids) + other(mids))

    def integral(self, lo: float = 0.0, hi: float = 1.0, c: float = 1.0) -> float:
        if lo < 0.0 or hi > 1.0 or lo >= hi:
            raise RangeError(f"interval [{lo}, {hi}] is outside (0, 1]")
        x0 = np.clip(self.breaks[:-1], lo, hi)
        x1 = np.clip(self.breaks[1:], lo, hi)
        seg = (x1**c - x0**c) / c
        nz = seg > 0
        with np.errstate(invalid="ignore"):
            return float(np.sum(self.values[nz] * seg[nz]))


Function = Union[PowLogFn, GridFn, StepFn]


# --------------------------------------------------------------------------
# dispatchers


def integrate(f: Function, lo: float, hi: float) -> float:
    """``int_lo^hi f(t) dt``.

    Atom-wise closed forms or quadrature for ``PowLogFn``, the exact
    integral of the linear-in-``u`` interpolant for ``GridFn`` and the
    exact sum for ``StepFn``.
    """
    if isinstance(f, PowLogFn):
        if not (0.0 <= lo < hi <= 1.0):
            raise RangeError(f"need 0 <= lo < hi <= 1, got lo={lo!r}, hi={hi!r}")
        hi = min(hi, f.support)
        if hi <= lo:
            return 0.0
        return float(sum(c * quad_powlog(a, b, lo, hi) for c, a, b in f.atoms))
    if isinstance(f, (GridFn, StepFn)):
        return f.integral(lo, hi)
    raise TypeError(f"cannot integrate {type(f).__name__}")


def _powlog_sup(f: PowLogFn, lo: float, hi: float, grid: Grid | None = None) -> float:
    grid = grid or default_grid()
    top = min(hi, f.support)
    if top < lo:
        return 0.0
    cand = [lo, top]
    nodes = grid.nodes
    cand.extend(nodes[(nodes > lo) & (nodes < top)])
    for c, a, b in f.atoms:
        if a != 0.0 and b / a > LOG2:
            ts = 2.0 * math.exp(-b / a)
            if lo < ts < top:
                cand.append(ts)
    cand = np.unique(np.asarray(cand, dtype=float))
    vals = np.asarray(f(cand), dtype=float)
    k = int(np.argmax(vals))
    best = float(vals[k])
    # polish between the neighbours of the best candidate
    ua = math.log(2.0 / cand[min(k + 1, cand.size - 1)])
    ub = math.log(2.0 / cand[max(k - 1, 0)])
    if ub > ua:
        res = _spo.minimize_scalar(
            lambda u: -float(f(2.0 * math.exp(-u))), bounds=(ua, ub), method="bounded",
            options={"xatol": 1e-12 * max(1.0, ua)},
        )
        if res.success and -res.fun > best:
            best = float(-res.fun)
    if hi > f.support and lo <= hi:
        best = max(best, 0.0)
    return best


def sup_on(f: Function, lo: float, hi: float, grid: Grid | None = None) -> float:
    """Supremum of ``f`` over ``[lo, hi]``.

    ``GridFn``: maximum over the nodes inside the interval.  ``PowLogFn``:
    nodes of the default grid, the endpoints and each atom's interior
    critical point ``t = 2 exp(-b/a)``, polished by a bounded search.
    ``StepFn``: exact.
    """
    if not (0.0 < lo <= hi <= 1.0):
        raise RangeError(f"need 0 < lo <= hi <= 1, got lo={lo!r}, hi={hi!r}")
    if isinstance(f, GridFn):
        t = f.grid.nodes
        sel = (t >= lo * (1 - 1e-14)) & (t <= hi * (1 + 1e-14))
        if not np.any(sel):
            raise RangeError(f"[{lo}, {hi}] contains no grid node")
        return float(np.max(f.values[sel]))
    if isinstance(f, StepFn):
        b = f.breaks
        k0 = int(np.searchsorted(b, lo, side="right") - 1)
        k1 = int(np.searchsorted(b, hi, side="left"))
        k0 = min(max(k0, 0), f.values.size - 1)
        k1 = max(k1, k0 + 1)
        return float(np.max(f.values[k0:k1]))
    if isinstance(f, PowLogFn):
        return _powlog_sup(f, lo, hi, grid)
    raise TypeError(f"cannot take sup of {type(f).__name__}")


def sample(f: Function, grid: Grid | None = None) -> GridFn:
    """Node values of ``f`` on ``grid``."""
    grid = grid or default_grid()
    if isinstance(f, GridFn):
        if f.grid is grid:
            return f
        return GridFn(grid, f(grid.nodes))
    return GridFn(grid, f(grid.nodes))


# --------------------------------------------------------------------------
# CSV I/O


def read_gridfn_csv(path: str | os.PathLike) -> GridFn:
    """Read a GridFn from CSV with header ``t,value`` (``inf`` allowed)."""
    import csv

    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(f"{path}: empty file (rule: header t,value)")
    header = [h.strip() for h in rows[0]]
    if "t" not in header or "value" not in header:
        raise ParseError(f"{path}: header {rows[0]!r} lacks columns t,value")
    it, iv = header.index("t"), header.index("value")
    ts, vs = [], []
    for line_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        ts.append(_num(row[it], f"line {line_no}: t"))
        vs.append(_num(row[iv], f"line {line_no}: value"))
    order = np.argsort(ts)
    grid = grid_from_nodes(np.asarray(ts)[order])
    return GridFn(grid, np.asarray(vs)[order])


def format_float(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))
