import json
import math

import numpy as np
import pytest

from riopt.errors import DomainError, ParseError, PreconditionError, SpecError
from riopt.funcrep import GridFn, PowLogFn, StepFn
from riopt.rearrange import sorted_steps
from riopt.spaces import (
    Exponential,
    FundamentalFn,
    LInfinity,
    Lebesgue,
    Lorentz,
    LorentzZygmund,
    Marcinkiewicz,
    Orlicz,
    PowerLog,
    YoungFn,
    delta2,
    dominates_near_infinity,
    endpoint_spaces,
    equivalent_near_infinity,
    fundamental,
    fundamental_numeric,
    fundamental_orlicz,
    is_norm,
    luxemburg_norm,
    norm,
    orlicz_membership,
    parse_space,
    validate_spec,
)

SPECS = [
    "L:1", "L:2", "L:inf", "Lor:2,1", "Lor:4/3,4", "Lor:3,inf", "LZ:2,2,-1", "LZ:inf,inf,-0.5",
    "LZ:inf,2,-1", "LZ:1,1,0.5", "expL:2", "expL:0.5", "LlogL:2,-1", "LlogL:1,1",
    "Lambda:1*t^0.5*log^-1", "Marc:1*t^0.5*log^-1",
]


def _random_step(rng, k=8):
    return StepFn(np.concatenate([[0], np.sort(rng.uniform(size=k - 1)), [1]]), rng.exponential(size=k))


# admissibility


def test_validate_examples():
    assert validate_spec(Lorentz(2, 1))
    assert not validate_spec(LorentzZygmund(math.inf, 2, -0.25))
    assert not validate_spec(Lorentz(1, 2))
    assert validate_spec(Lorentz(1, 1))
    assert not validate_spec(Lebesgue(0.5))


def test_inadmissible_norm_raises():
    with pytest.raises(SpecError):
        norm(Lorentz(1, 2), StepFn.from_cells([1.0]))


@pytest.mark.parametrize("text", ["L", "Lor:2", "LZ:2,2", "Foo:1", "L:abc", "Orlicz:/no/such/file.json", "LZ:2,2,beta=1"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_space(text)


def test_parse_alias_and_fraction():
    s = parse_space("LZ:inf,2,alpha=-3/4")
    assert s == LorentzZygmund(math.inf, 2.0, -0.75)
    assert parse_space("Lor:4/3,4") == Lorentz(4 / 3, 4.0)


def test_orlicz_file(tmp_path):
    p = tmp_path / "a.json"
    p.write_text(json.dumps({"type": "powerlog", "p": 2, "a": -1}))
    s = parse_space("Orlicz:a.json", base_dir=str(tmp_path))
    assert isinstance(s, Orlicz) and s.A.asymptote == PowerLog(2.0, -1.0)


# closed-form norms


def test_linf_of_constant():
    assert norm(Lebesgue(math.inf), PowLogFn.constant(1.0)) == 1.0


@pytest.mark.parametrize("p,q", [(2, 1), (3, 2), (4 / 3, 4), (1.5, 1.5)])
@pytest.mark.parametrize("a", [1e-20, 1e-3, 0.3])
def test_lorentz_indicator(p, q, a):
    expect = (p / q) ** (1 / q) * a ** (1 / p)
    assert norm(Lorentz(p, q), StepFn.indicator(0.0, a)) == pytest.approx(expect, rel=1e-10)
    assert norm(Lorentz(p, q), PowLogFn.indicator(a)) == pytest.approx(expect, rel=1e-10)


def test_l1_is_integral():
    rng = np.random.default_rng(0)
    for _ in range(20):
        f = StepFn(np.concatenate([[0], np.sort(rng.uniform(size=5)), [1]]), rng.normal(size=6))
        assert norm(Lebesgue(1), f) == pytest.approx(float(np.sum(np.abs(f.values) * f.measures)), rel=1e-6)


def test_marcinkiewicz_closed_form():
    s = Marcinkiewicz(FundamentalFn(PowLogFn([(1.0, 0.5, 0.0)])))
    assert norm(s, PowLogFn([(1.0, -0.5, 0.0)])) == pytest.approx(2.0, rel=1e-9)


def test_endpoint_norms_of_indicators():
    # concave phi: both endpoint norms of chi_(0,a) equal phi(a)
    lam, marc = endpoint_spaces(FundamentalFn(PowLogFn([(1.0, 0.5, 0.0)])))
    for a in (1e-12, 1e-4, 0.2):
        assert norm(lam, StepFn.indicator(0.0, a)) == pytest.approx(a**0.5, rel=1e-9)
        assert norm(marc, StepFn.indicator(0.0, a)) == pytest.approx(a**0.5, rel=1e-9)
    # t^1/2 log^-1: Lambda sees the concave majorant; M sees phi itself
    # where t/phi is still increasing (t < 2e^-2), and sup phi(t) a/t beyond
    phi = FundamentalFn(PowLogFn([(1.0, 0.5, -1.0)]))
    lam, marc = endpoint_spaces(phi)
    for a in (1e-12, 1e-4, 0.2):
        assert norm(lam, StepFn.indicator(0.0, a)) == pytest.approx(phi.majorant(a), rel=1e-6)
    for a in (1e-12, 1e-4):
        assert norm(marc, StepFn.indicator(0.0, a)) == pytest.approx(float(phi(a)), rel=1e-6)
    assert norm(marc, StepFn.indicator(0.0, 0.2)) == pytest.approx(0.2 / math.log(2.0), rel=1e-6)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 4.0])
def test_luxemburg_power_indicator(p):
    for a in (1e-10, 0.01, 0.5):
        assert luxemburg_norm(YoungFn.power(p), StepFn.indicator(0.0, a)) == pytest.approx(a ** (1 / p), rel=1e-12)


def test_luxemburg_linf_is_ess_sup():
    f = StepFn([0, 0.3, 1.0], [5.0, 2.0])
    assert luxemburg_norm(YoungFn.linfinity(), f) == 5.0


@pytest.mark.parametrize("a", [1e-8, 1e-3, 0.3, 0.5])
def test_luxemburg_exponential_indicator(a):
    expect = 1.0 / math.log1p(1.0 / a)
    assert luxemburg_norm(YoungFn.exponential(1.0), StepFn.indicator(0.0, a)) == pytest.approx(expect, rel=1e-12)
    A = YoungFn.from_callable(np.expm1, Exponential(1.0), "e^t - 1")
    assert luxemburg_norm(A, StepFn.indicator(0.0, a)) == pytest.approx(expect, rel=1e-10)


def test_luxemburg_smooth_vs_sampled(grid):
    f = PowLogFn([(1.0, -0.3, 0.5)])
    A = YoungFn.powerlog(2.0, -1.0)
    assert luxemburg_norm(A, f) == pytest.approx(luxemburg_norm(A, f.sample(grid)), rel=1e-3)


# fundamental functions


def test_fundamental_closed_forms(grid):
    t = grid.nodes
    np.testing.assert_allclose(fundamental(Lebesgue(2), grid).values(), t**0.5, rtol=1e-14)
    lz = fundamental(LorentzZygmund(math.inf, math.inf, -0.5), grid).values()
    ex = fundamental(exp_space := parse_space("expL:2"), grid).values()
    np.testing.assert_allclose(lz, np.log(2 / t) ** -0.5, rtol=1e-14)
    r = ex / lz
    assert np.max(r) / np.min(r) < 4.0, exp_space


def test_orlicz_identity_numeric(coarse):
    A = YoungFn.exponential(2.0)
    num = fundamental_numeric(Orlicz(A), coarse).values
    np.testing.assert_allclose(num * A.inverse(1.0 / coarse.nodes), 1.0, rtol=1e-6)


@pytest.mark.parametrize("text", SPECS)
def test_fundamental_quasiconcave(text, coarse):
    phi = fundamental(parse_space(text), coarse)
    assert phi.is_quasiconcave_equiv(coarse)


def test_majorant_sandwich(coarse):
    phi = FundamentalFn(GridFn(coarse, np.minimum(2 * coarse.nodes, 0.5) + 1e-3 * coarse.nodes**0.5))
    maj = phi.majorant(coarse.nodes)
    v = phi.values()
    assert np.all(maj >= v * (1 - 1e-12)) and np.all(v >= maj / 2 * (1 - 1e-12))


def test_non_quasiconcave_rejected(coarse):
    with pytest.raises(DomainError):
        FundamentalFn(PowLogFn([(1.0, 2.0, 0.0)]), coarse)


# Young functions


@pytest.mark.parametrize(
    "A",
    [YoungFn.power(1.5), YoungFn.powerlog(2.0, -1.0), YoungFn.powerlog(3.0, 2.0), YoungFn.exponential(2.0), YoungFn.exponential(0.5)],
    ids=["power", "powerlog-", "powerlog+", "exp2", "exp0.5"],
)
def test_young_inverse_and_convexity(A):
    t = np.geomspace(1e-6, 1e3, 400)
    v = A(t)
    fin = np.isfinite(v) & (v > 0)
    np.testing.assert_allclose(A.inverse(v[fin]), t[fin], rtol=1e-9)
    assert A(0.0) == 0.0
    x = np.linspace(0.0, 20.0, 2001)
    y = A(x)
    assert np.all(np.diff(y) >= 0)
    d2 = y[:-2] - 2 * y[1:-1] + y[2:]
    assert np.all(d2 >= -1e-9 * np.abs(y[1:-1]))


def test_dominance_examples():
    assert dominates_near_infinity(YoungFn.powerlog(2, 0), YoungFn.powerlog(2, -1))
    assert not dominates_near_infinity(YoungFn.powerlog(2, -1), YoungFn.powerlog(2, 0))
    assert dominates_near_infinity(YoungFn.exponential(1), YoungFn.powerlog(100, 0))
    assert equivalent_near_infinity(YoungFn.powerlog(2, 0), YoungFn.power(2))
    assert dominates_near_infinity(YoungFn.linfinity(), YoungFn.exponential(5))


def test_delta2_examples():
    assert delta2(YoungFn.powerlog(2, -1))
    assert not delta2(YoungFn.exponential(2))
    assert not delta2(YoungFn.linfinity())


@pytest.mark.parametrize(
    "phi,desc",
    [
        (PowLogFn([(1.0, 0.5, 0.0)]), PowerLog(2.0, 0.0)),
        (PowLogFn([(1.0, 0.0, -0.5)]), Exponential(2.0)),
        (PowLogFn([(1.0, 0.5, -0.5)]), PowerLog(2.0, -1.0)),
        (PowLogFn([(1.0, 1.0 / 3.0, -2.0 / 3.0)]), PowerLog(3.0, -2.0)),
        (PowLogFn.constant(1.0), LInfinity()),
    ],
)
def test_fundamental_orlicz_descriptor(phi, desc, coarse):
    A = fundamental_orlicz(FundamentalFn(phi, coarse))
    got = A.asymptote
    assert type(got) is type(desc)
    for k, v in vars(desc).items():
        assert getattr(got, k) == pytest.approx(v, abs=1e-9)


def test_fundamental_orlicz_level(coarse):
    phi = FundamentalFn(PowLogFn([(1.0, 0.5, -0.5)]), coarse)
    A = fundamental_orlicz(phi)
    r = fundamental_numeric(Orlicz(A), coarse).values / phi.values()
    assert 0.5 - 1e-9 <= np.min(r) and np.max(r) <= 2.0 + 1e-9


# membership


def test_membership_examples():
    A = YoungFn.powerlog(2.0, -1.0)
    assert orlicz_membership(A, PowLogFn([(1.0, -0.5, -0.25)])).member is True
    assert orlicz_membership(A, PowLogFn([(1.0, -0.5, 0.05)])).member is False
    rep = orlicz_membership(YoungFn.powerlog(2.0, 0.0), PowLogFn.constant(1.0))
    assert rep.member is True and rep.integrals[-1] == pytest.approx(1.0, rel=1e-9)


def test_membership_needs_delta2():
    with pytest.raises(PreconditionError):
        orlicz_membership(YoungFn.exponential(1.0), PowLogFn.constant(1.0))


# norm axioms


@pytest.mark.parametrize("text", SPECS)
def test_norm_axioms(text):
    s = parse_space(text)
    rng = np.random.default_rng(abs(hash(text)) % 2**32)
    for _ in range(5):
        f = _random_step(rng)
        nf = norm(s, f)
        assert norm(s, StepFn(f.breaks, 3.5 * f.values)) == pytest.approx(3.5 * nf, rel=1e-9)
        bigger = StepFn(f.breaks, f.values + rng.exponential(size=f.values.size))
        assert norm(s, bigger) >= nf * (1 - 1e-9)
        assert norm(s, sorted_steps(f)) == pytest.approx(nf, rel=1e-12)
        # L^inf -> X -> L^1 with finite constants
        assert float(np.sum(f.values * f.measures)) <= 4.0 * nf
        assert nf <= 4.0 * float(np.max(f.values))


def test_triangle_for_norms():
    rng = np.random.default_rng(11)
    for text in SPECS:
        s = parse_space(text)
        if not is_norm(s):
            continue
        for _ in range(5):
            f = StepFn.from_cells(rng.exponential(size=8))
            g = StepFn.from_cells(rng.exponential(size=8))
            h = StepFn.from_cells(f.values + g.values)
            assert norm(s, h) <= (norm(s, f) + norm(s, g)) * (1 + 1e-9)


def test_lorentz_nesting():
    rng = np.random.default_rng(12)
    fam = [_random_step(rng) for _ in range(40)] + [PowLogFn([(1.0, -0.3, b)]) for b in (-1, 0, 1)]
    for p in (1.5, 2.0, 4.0):
        for r, s in [(1, 2), (2, 4), (1, math.inf), (4, math.inf)]:
            ratios = [norm(Lorentz(p, s), f) / norm(Lorentz(p, r), f) for f in fam]
            # ||f||_{p,s} <= (q/p)^{...} ||f||_{p,r}; the constant is at most (r/p)^{1/r - 1/s} <= 1 here
            assert max(ratios) <= max(1.0, (r / p) ** (1 / r - (0 if math.isinf(s) else 1 / s))) * (1 + 1e-9)


def test_endpoint_spaces_power_level():
    rng = np.random.default_rng(13)
    lam, marc = endpoint_spaces(FundamentalFn(PowLogFn([(1.0, 0.5, 0.0)])))
    r1, r2 = [], []
    for _ in range(50):
        f = _random_step(rng)
        r1.append(norm(lam, f) / norm(Lorentz(2, 1), f))
        r2.append(norm(marc, f) / norm(Lorentz(2, math.inf), f))
    assert max(r1) / min(r1) < 4.0 and max(r2) / min(r2) < 4.0


def test_endpoint_exp_level():
    _, marc = endpoint_spaces(FundamentalFn(PowLogFn([(1.0, 0.0, -0.5)])))
    phi_m = fundamental(marc).values()
    phi_e = fundamental(parse_space("expL:2")).values()
    r = phi_m / phi_e
    assert np.max(r) / np.min(r) < 4.0
