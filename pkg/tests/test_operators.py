import math

import numpy as np
import pytest

from riopt.errors import DomainError, ParameterError, SpecError
from riopt.funcrep import GridFn, PowLogFn, StepFn, make_log_grid
from riopt.operators import (
    CopsonOp,
    DilationOp,
    SupOp,
    copson,
    default_family,
    dilate,
    lemma37_condition,
    op_norm_estimate,
    sup_op,
)
from riopt.spaces import LorentzZygmund, norm, parse_space

SPECS = ["L:1", "L:2", "L:inf", "Lor:2,1", "Lor:4/3,4", "LZ:inf,inf,-0.5", "LZ:2,1,0.5", "expL:2", "LlogL:2,-1"]


# Copson operator


def test_copson_parameters():
    with pytest.raises(ParameterError):
        CopsonOp(1, 0.4)  # alpha below 1 - 1/n for n = 2
    with pytest.raises(ParameterError):
        CopsonOp(2, 0.5)  # m(1 - alpha) = 1
    with pytest.raises(ParameterError):
        CopsonOp(0, 0.5)
    op = CopsonOp(1, 0.5)
    assert op.c == 0.5 and op.kernel_exp == -0.5
    assert CopsonOp(1, 0.7, n=3).c == pytest.approx(0.3)
    with pytest.raises(ParameterError):
        CopsonOp(1, 0.6, n=3)


def test_copson_constant(grid):
    out = copson(CopsonOp(1, 0.5), PowLogFn.constant(1.0))
    assert isinstance(out, PowLogFn)
    t = grid.nodes
    np.testing.assert_allclose(out(t), 2 * (1 - np.sqrt(t)), rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("a", [1e-6, 0.25])
def test_copson_indicator(a, grid):
    t = grid.nodes
    expect = np.where(t < a, 2 * (math.sqrt(a) - np.sqrt(np.minimum(t, a))), 0.0)
    sym = copson(CopsonOp(1, 0.5), PowLogFn.indicator(a))
    np.testing.assert_allclose(sym(t), expect, rtol=1e-12, atol=1e-15)
    step = copson(CopsonOp(1, 0.5), StepFn.indicator(0.0, a), grid)
    np.testing.assert_allclose(step.values, expect, rtol=1e-12, atol=1e-15)


def test_copson_witness_three_routes(grid):
    t = grid.nodes
    f = PowLogFn([(1.0, -0.5, -0.25)])
    expect = (4 / 3) * (np.log(2 / t) ** 0.75 - math.log(2) ** 0.75)
    op = CopsonOp(1, 0.5)
    np.testing.assert_allclose(copson(op, f)(t), expect, rtol=1e-12, atol=1e-14)
    # the sampled route integrates the u-linear interpolant, so it carries
    # the interpolation error of the grid rather than round-off
    np.testing.assert_allclose(copson(op, f.sample(grid)).values, expect, rtol=1e-4, atol=1e-10)


def test_copson_quadrature_route(grid):
    # t^-0.3 log^0.5 has no closed-form antiderivative against s^-1/2
    f = PowLogFn([(1.0, -0.3, 0.5)])
    out = copson(CopsonOp(1, 0.5), f, grid)
    assert isinstance(out, GridFn)
    from riopt.funcrep import quad_powlog

    for k in (0, 500, 1500):
        assert out.values[k] == pytest.approx(quad_powlog(-0.8, 0.5, grid.nodes[k], 1.0), rel=1e-10)


def test_copson_negative_input(coarse):
    with pytest.raises(DomainError):
        copson(CopsonOp(1, 0.5), GridFn(coarse, -np.ones(coarse.size)))
    with pytest.raises(DomainError):
        copson(CopsonOp(1, 0.5), StepFn.from_cells([1.0, -1.0]))


def test_copson_monotone_and_linear(grid):
    rng = np.random.default_rng(0)
    op = CopsonOp(1, 2 / 3)
    for _ in range(10):
        f = GridFn(grid, rng.exponential(size=grid.size))
        g = GridFn(grid, rng.exponential(size=grid.size))
        cf, cg, cs = copson(op, f), copson(op, g), copson(op, f + g)
        assert np.all(np.diff(cf.values) <= 0)
        np.testing.assert_allclose(cs.values, cf.values + cg.values, rtol=1e-9)


def test_copson_inf_propagates(coarse):
    v = np.ones(coarse.size)
    v[3] = np.inf
    out = copson(CopsonOp(1, 0.5), GridFn(coarse, v))
    assert np.all(np.isinf(out.values[:4])) and np.all(np.isfinite(out.values[4:]))


# T_gamma


def test_sup_op_constant(grid):
    t = grid.nodes
    np.testing.assert_allclose(sup_op(0.5, PowLogFn.constant(3.0), grid).values, 3.0 * t**-0.5, rtol=1e-12)
    np.testing.assert_allclose(sup_op(0.5, GridFn(grid, np.full(t.size, 3.0))).values, 3.0 * t**-0.5, rtol=1e-12)


def test_sup_op_power(grid):
    t = grid.nodes
    np.testing.assert_allclose(sup_op(0.3, PowLogFn([(1.0, -0.3, 0.0)]), grid).values, t**-0.3, rtol=1e-12)


@pytest.mark.parametrize("a", [1e-10, 0.01, 0.6])
def test_sup_op_indicator(a, grid):
    t = grid.nodes
    expect = np.where(t < a, (a / t) ** 0.5, 0.0)
    np.testing.assert_allclose(sup_op(0.5, StepFn.indicator(0.0, a), grid).values, expect, rtol=1e-12)


def test_sup_op_output_envelope(grid):
    rng = np.random.default_rng(2)
    g = GridFn(grid, rng.exponential(size=grid.size))
    out = sup_op(0.4, g)
    env = grid.nodes**0.4 * out.values
    assert np.all(np.diff(env) <= 1e-12 * env[1:])


def test_sup_op_power_log(grid):
    # g = s^-1/2 log^b is non-increasing on (0, 1] when -log(2)/2 <= b <= 0;
    # s^1/2 g = log(2/s)^b then increases, so the supremum sits at s = 1
    t = grid.nodes
    for b in (0.0, -0.2, -0.34):
        g = PowLogFn([(1.0, -0.5, b)])
        assert g.is_nonincreasing(grid)
        np.testing.assert_allclose(sup_op(0.5, g, grid).values, t**-0.5 * math.log(2) ** b, rtol=1e-12)
    # with b > 0, s^1/2 g decreases and T_gamma g = g
    g = PowLogFn([(1.0, -0.5, 1.5)])
    np.testing.assert_allclose(sup_op(0.5, g, grid).values, g(t), rtol=1e-12)


def test_sup_op_nonmonotone_powlog(coarse):
    # t^-1/2 log^-1/2 increases for t > 2/e, so it goes through the step route
    g = PowLogFn([(1.0, -0.5, -0.5)])
    assert not g.is_nonincreasing(coarse)
    out = sup_op(0.5, g, coarse)
    np.testing.assert_allclose(out.values, sup_op(0.5, g.sample(coarse)).values, rtol=1e-14)


def test_sup_op_gridfn_brute_force(coarse):
    # a GridFn is the step function on its dual cells; T_gamma of it is
    # t^-gamma max over cells right of t of (right end)^gamma v_k
    rng = np.random.default_rng(4)
    g = GridFn(coarse, np.sort(rng.exponential(size=coarse.size))[::-1])
    out = sup_op(0.5, g).values
    br = coarse.cell_breaks
    for k, t in enumerate(coarse.nodes):
        j = np.searchsorted(br, t, side="right") - 1
        j = min(j, coarse.size - 1)
        ref = t**-0.5 * np.max(br[j + 1 :] ** 0.5 * g.values[j:])
        assert out[k] == pytest.approx(ref, rel=1e-12)
    assert np.all(out >= g.values * (1 - 1e-12))


def test_sup_op_gamma_range():
    with pytest.raises(ParameterError):
        SupOp(1.0)
    with pytest.raises(ParameterError):
        sup_op(0.0, PowLogFn.constant(1.0))


# dilation


def test_dilate_identity_and_half():
    f = StepFn([0, 0.3, 1.0], [2.0, 1.0])
    d = dilate(1.0, f)
    np.testing.assert_array_equal(d.breaks, f.breaks)
    h = dilate(0.5, StepFn.from_cells([1.0]))
    np.testing.assert_allclose(h.breaks, [0, 0.5, 1.0])
    np.testing.assert_array_equal(h.values, [1.0, 0.0])


def test_dilate_gridfn(grid):
    f = PowLogFn([(1.0, -0.2, 0.0)])
    d = dilate(0.25, f, grid)
    t = grid.nodes
    inside = t <= 0.25
    np.testing.assert_allclose(d.values[inside], (t[inside] / 0.25) ** -0.2, rtol=1e-12)
    assert np.all(d.values[~inside] == 0.0)
    with pytest.raises(ParameterError):
        DilationOp(0.0)


@pytest.mark.parametrize("lam", [0.125, 0.5, 1.0, 2.0, 8.0])
def test_dilation_norm_bound(lam):
    # E_lambda f(t) = f(t/lambda) compresses for lambda < 1 and stretches for
    # lambda > 1, so ||E_lambda f|| <= max{1, lambda} ||f||
    rng = np.random.default_rng(3)
    fam = [StepFn(np.concatenate([[0], np.sort(rng.uniform(size=5)), [1]]), rng.exponential(size=6)) for _ in range(50)]
    for text in SPECS:
        s = parse_space(text)
        worst = max(norm(s, dilate(lam, f)) / norm(s, f) for f in fam)
        assert worst <= max(1.0, lam) * (1 + 1e-6)


def test_dilation_stretch_counterexample():
    # the bound max{1, 1/lambda} fails for lambda = 2: E_2 chi_(0,1/2) = chi_(0,1)
    f = StepFn.indicator(0.0, 0.5)
    d = dilate(2.0, f)
    np.testing.assert_array_equal(d.values, [1.0])
    assert norm(parse_space("L:1"), d) / norm(parse_space("L:1"), f) == pytest.approx(2.0)


# operator norm estimates


def test_family_shape():
    fam = default_family(0)
    labels = [lab for lab, _ in fam]
    assert len(fam) == 10 + 10 * 5 + 100
    assert len(set(labels)) == len(labels)
    assert default_family(0)[-1][1].values.tolist() == fam[-1][1].values.tolist()


def test_empty_family():
    with pytest.raises(ParameterError):
        op_norm_estimate(CopsonOp(1, 0.5), parse_space("L:2"), parse_space("L:2"), family=[])


def test_inadmissible_spec():
    with pytest.raises(SpecError):
        op_norm_estimate(CopsonOp(1, 0.5), parse_space("Lor:1,2"), parse_space("L:2"))


def test_copson_bounded_into_linf():
    rep = op_norm_estimate(CopsonOp(1, 0.5), parse_space("Lor:2,1"), parse_space("L:inf"), family=default_family(0, 20))
    assert rep.verdict == "bounded"
    assert len(rep.refinement_trend) == 3
    assert [t for t, _ in rep.refinement_trend] == [1e-10, 1e-20, 1e-30]


def test_sup_op_bounded():
    s = LorentzZygmund(1.0, 1.0, 0.5)
    rep = op_norm_estimate(SupOp(0.5), s, s, family=default_family(0, 20))
    assert rep.verdict == "bounded"


def test_copson_diverging_with_witness():
    w = ("witness", PowLogFn([(1.0, -0.5, -0.25)]))
    rep = op_norm_estimate(
        CopsonOp(1, 0.5), parse_space("LlogL:2,-1"), parse_space("expL:2"), family=default_family(0, 10), witness=w
    )
    assert rep.verdict == "diverging"
    assert rep.certificate["witness"] == "witness"
    assert rep.certificate["domain_norm_finite"]
    d = rep.to_dict()
    assert d["refinement_trend"][0][0] == 1e-10


# weighted condition for T_gamma


@pytest.mark.parametrize("gamma", [0.01, 0.1, 0.5, 0.9])
def test_lemma37_condition(gamma):
    rep = lemma37_condition(gamma)
    assert rep["holds"]
    assert rep["route_gap"] <= 1e-9
    tr = np.asarray(rep["max_ratio_trend"])
    assert np.max(tr) / np.min(tr) <= 1.10
    # the ratio approaches 1/(1 - gamma) as t -> 0
    assert rep["ratio_at_t_min"][-1] == pytest.approx(1 / (1 - gamma), rel=0.05)


def test_lemma37_half_oracle():
    # LHS = t^1/2 int_0^t s^-1/2 log(2/s)^1/2 ds, RHS = int_0^t log(2/s)^1/2 ds, by mpmath
    import mpmath as mp

    mp.mp.dps = 30
    t = mp.mpf("1e-6")
    lhs = mp.sqrt(t) * mp.quad(lambda s: s ** -0.5 * mp.sqrt(mp.log(2 / s)), [0, t])
    rhs = mp.quad(lambda s: mp.sqrt(mp.log(2 / s)), [0, t])
    g = make_log_grid(1e-6, 64)
    rep = lemma37_condition(0.5, refinements=(1e-6,), points_per_decade=64)
    assert rep["ratio_at_t_min"][0] == pytest.approx(float(lhs / rhs), rel=1e-8)
    assert g.nodes[0] == 1e-6
