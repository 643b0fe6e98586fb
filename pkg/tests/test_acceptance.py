"""Acceptance suite: eight criteria at their stated tolerances.

Each criterion is a function returning ``(ok, detail)``; the pytest
wrappers print one PASS/FAIL line per criterion and then assert.  Run
``python3 tests/test_acceptance.py`` for the summary alone.
"""

from __future__ import annotations

import math
import sys
import time

import numpy as np
import pytest

from riopt.funcrep import PowLogFn, StepFn, make_log_grid
from riopt.mazya import MazyaParams, eta, geometric_sum_check, model_profile, omega_volume, psi, thm31_sandwich
from riopt.operators import dilate, lemma37_condition
from riopt.optimality import (
    LARGEST,
    NO_LARGEST,
    EmbeddingProblem,
    lemma36_check,
    optimal_domain_norm,
    phi_X_profile,
    principal_alternative,
    thm38_pipeline,
    witness_fn,
)
from riopt.rearrange import check_hl_inequality, rearrangement
from riopt.spaces import (
    FundamentalFn,
    Lorentz,
    Orlicz,
    YoungFn,
    exp_space,
    fundamental_numeric,
    fundamental_orlicz,
    luxemburg_norm,
    norm,
    orlicz_membership,
    parse_space,
)
from riopt.trend import REFINEMENTS

SIX_SPECS = ["L:1", "L:2", "Lor:2,1", "LZ:inf,inf,-0.5", "expL:2", "LlogL:2,-1"]


def _random_step(rng: np.random.Generator, max_cells: int = 12, ties: bool = False) -> StepFn:
    k = int(rng.integers(1, max_cells + 1))
    cuts = np.sort(rng.uniform(0.0, 1.0, size=k - 1))
    b = np.concatenate([[0.0], cuts, [1.0]])
    if ties:
        v = rng.integers(-3, 4, size=k).astype(float)
    else:
        v = rng.normal(0.0, 2.0, size=k)
    return StepFn(b, v)


# --------------------------------------------------------------------------
# independent oracles


def _sort_by_measure(f: StepFn) -> tuple[np.ndarray, np.ndarray]:
    """Cells sorted by |value| (descending) laid end to end from 0."""
    cells = sorted(zip(np.abs(f.values).tolist(), np.diff(f.breaks).tolist()), key=lambda c: -c[0])
    b, acc = [0.0], 0.0
    for _, m in cells:
        acc += m
        b.append(acc)
    b[-1] = 1.0
    return np.array(b), np.array([v for v, _ in cells])


def _eval_steps(b: np.ndarray, v: np.ndarray, x: np.ndarray) -> np.ndarray:
    k = np.clip(np.searchsorted(b, x, side="right") - 1, 0, v.size - 1)
    return v[k]


def _product_oracle(f: StepFn, g: StepFn) -> float:
    b = np.union1d(f.breaks, g.breaks)
    mid = 0.5 * (b[:-1] + b[1:])
    return float(np.sum(np.abs(_eval_steps(f.breaks, f.values, mid) * _eval_steps(g.breaks, g.values, mid)) * np.diff(b)))


def _lp_oracle(f: StepFn, p: float) -> float:
    return float(np.sum(np.abs(f.values) ** p * np.diff(f.breaks)) ** (1.0 / p))


# --------------------------------------------------------------------------
# criteria


def criterion_1() -> tuple[bool, str]:
    rng = np.random.default_rng(1)
    mismatches = 0
    for i in range(1000):
        f = _random_step(rng, ties=bool(i % 2))
        star = rearrangement(f).steps
        ob, ov = _sort_by_measure(f)
        pts = np.union1d(ob, star.breaks)
        mid = 0.5 * (pts[:-1] + pts[1:])
        same_values = np.array_equal(star(mid), _eval_steps(ob, ov, mid))
        # breaks where the value changes must coincide
        jumps = ob[1:-1][ov[1:] != ov[:-1]]
        same_jumps = np.all(np.min(np.abs(star.breaks[:, None] - jumps[None, :]), axis=0) == 0.0) if jumps.size else True
        mismatches += int(not (same_values and same_jumps))
    violations = 0
    worst = -math.inf
    for _ in range(1000):
        f, g = _random_step(rng), _random_step(rng)
        rep = check_hl_inequality(f, g)
        lhs = _product_oracle(f, g)
        fb, fv = _sort_by_measure(f)
        gb, gv = _sort_by_measure(g)
        rhs = _product_oracle(StepFn(fb, fv), StepFn(gb, gv))
        worst = max(worst, lhs / rhs - 1.0, rep["lhs"] / rep["rhs"] - 1.0)
        if not rep["holds"] or lhs > rhs * (1.0 + 1e-9):
            violations += 1
    ok = mismatches == 0 and violations == 0
    return ok, f"rearrangement mismatches {mismatches}/1000, Hardy-Littlewood violations {violations}/1000 (max lhs/rhs - 1 = {worst:.2e})"


def criterion_2() -> tuple[bool, str]:
    rng = np.random.default_rng(2)
    worst_lp = 0.0
    for p in (1.0, 1.5, 2.0, 4.0):
        A = YoungFn.power(p)
        for _ in range(100):
            f = _random_step(rng)
            exact = _lp_oracle(f, p)
            got = luxemburg_norm(A, f)
            worst_lp = max(worst_lp, abs(got - exact) / exact)
    grid = make_log_grid(1e-30, 64)
    t = grid.nodes
    worst_id = 0.0
    for A in (YoungFn.power(3.0), YoungFn.powerlog(2.0, 1.0), YoungFn.powerlog(2.0, -1.0), YoungFn.exponential(2.0), YoungFn.exponential(0.5)):
        phi = fundamental_numeric(Orlicz(A), grid).values
        ident = phi * np.asarray(A.inverse(1.0 / t), dtype=float)
        worst_id = max(worst_id, float(np.max(np.abs(ident - 1.0))))
    ok = worst_lp <= 1e-8 and worst_id <= 1e-6
    return ok, f"max rel |Luxemburg - L^p| = {worst_lp:.2e} (tol 1e-8); max |phi * A^-1(1/t) - 1| = {worst_id:.2e} over {t.size} nodes (tol 1e-6)"


def criterion_3() -> tuple[bool, str]:
    devs = {}
    for n, a in [(2, 0.5), (2, 0.9), (3, 2.0 / 3.0), (3, 0.75), (4, 0.75)]:
        devs[(n, a)] = abs(omega_volume(MazyaParams(n, a)) - 1.0)
    tt = np.linspace(0.0, 2.0, 2001)
    prof = float(np.max(np.abs(eta(MazyaParams(2, 0.5), tt) - 0.5 * (1.0 - tt / 2.0))))
    ok = max(devs.values()) <= 1e-6 and prof <= 4 * np.finfo(float).eps
    return ok, f"max |volume - 1| = {max(devs.values()):.2e} (tol 1e-6); triangle profile max error {prof:.2e}"


def criterion_4() -> tuple[bool, str]:
    phis = {
        "log^-1/2": PowLogFn([(1.0, 0.0, -0.5)]),
        "t^1/4": PowLogFn([(1.0, 0.25, 0.0)]),
        "t^1/2 log^-1": PowLogFn([(1.0, 0.5, -1.0)]),
    }
    bad = []
    gap = 0.0
    for lab, ph in phis.items():
        phi = FundamentalFn(ph)
        for alpha in (0.5, 2.0 / 3.0, 0.9):
            sw = thm31_sandwich(phi, model_profile(alpha))
            ps = psi(alpha, phi)
            gs = geometric_sum_check(alpha, phi)
            gap = max(gap, ps.max_gap)
            if not (sw.holds and ps.max_gap <= 1e-9 and gs["holds"]):
                bad.append((lab, round(alpha, 3)))
    return not bad, f"9 cases, failing {bad or 'none'}; max gap between the two psi forms {gap:.2e}"


def criterion_5() -> tuple[bool, str]:
    rep = phi_X_profile(1, 0.5)
    r = rep["max_over_min"]
    return r <= 20.0, f"max/min of optimal_domain_norm(chi_(0,a)) / (a^1/2 log(2/a)^-1/2) = {r:.3f} over 41 a in [1e-10, 1/2] (bound 20)"


def _beta_lattice(c: float) -> list[float]:
    lo, hi = -c, 1.0 - 2.0 * c
    return [lo + (hi - lo) * k / 4.0 for k in (1, 2, 3)]


def criterion_6() -> tuple[bool, str]:
    m = 1
    rows, ok = [], True
    for alpha in (0.5, 2.0 / 3.0, 0.9):
        c = m * (1.0 - alpha)
        for beta in _beta_lattice(c):
            rep = thm38_pipeline(m, alpha, q=math.inf, beta=beta)
            expected = beta + c
            hit = abs(rep.divergence_slope - expected) <= 0.10 * abs(expected)
            ok &= hit and rep.membership
            rows.append(f"a={alpha:.3g} b={beta:+.3f}: slope {rep.divergence_slope:.3f} vs {expected:.3f}{'' if hit else ' MISS'}")
        A = fundamental_orlicz(FundamentalFn(PowLogFn([(1.0, c, c - 1.0)])))
        above = orlicz_membership(A, witness_fn(m, alpha, 1.0 - 2.0 * c + 0.05)).member
        ok &= above is False
        rows.append(f"a={alpha:.3g} beta above threshold: member={above}")
    return ok, "; ".join(rows)


def criterion_7() -> tuple[bool, str]:
    pe = EmbeddingProblem(1, 0.5, target=exp_space(2.0))
    fam_exp = [(f"f_beta={b:g}", witness_fn(1, 0.5, b)) for b in (-0.4, -0.25, -0.1)]
    from riopt.operators import default_family

    fam = default_family(0, 20)
    pa_exp = principal_alternative(PowLogFn([(1.0, 0.5, -0.5)]), lambda f, g: optimal_domain_norm(pe, f, g), fam_exp + fam, REFINEMENTS)
    lor = Lorentz(4.0 / 3.0, 4.0)
    pa_lor = principal_alternative(PowLogFn([(1.0, 0.75, 0.0)]), lambda f, g: norm(lor, f, g), fam, REFINEMENTS)
    ev_exp, ev_lor = pa_exp["evidence"], pa_lor["evidence"]
    # stability: the witness norm grows at every refinement step, the Lorentz ratio stays flat at every step
    wn = [np.asarray(v) for v in ev_exp["witness_norms"].values()]
    exp_stable = bool(wn) and all(np.all(np.diff(v) > 0) for v in wn)
    w = np.asarray(ev_lor["worst_ratio_trend"])
    lor_stable = bool(np.max(w) / np.min(w) <= 1.10)
    ok = pa_exp["decision"] == NO_LARGEST and pa_lor["decision"] == LARGEST and exp_stable and lor_stable
    return ok, (
        f"exp L level: {pa_exp['decision']} (witnesses {ev_exp['witnesses']}); "
        f"Lor:4/3,4 level: {pa_lor['decision']} (worst ratios {[round(float(x), 4) for x in w]})"
    )


def criterion_8() -> tuple[bool, str]:
    flat = {}
    for gamma in (0.1, 0.5, 0.9):
        r = lemma37_condition(gamma)
        tr = np.asarray(r["max_ratio_trend"])
        flat[gamma] = float(np.max(tr) / np.min(tr))
    lemma37_ok = all(v <= 1.10 for v in flat.values())
    rng = np.random.default_rng(8)
    fam = [StepFn.indicator(0.0, 10.0**-k) for k in (1, 3, 6)] + [_random_step(rng) for _ in range(12)]
    dil_bad = {0.125: 0, 0.5: 0, 2.0: 0}
    dil_worst = dict.fromkeys(dil_bad, 0.0)
    for text in SIX_SPECS:
        s = parse_space(text)
        for lam in dil_bad:
            for f in fam:
                r = norm(s, dilate(lam, f)) / norm(s, f)
                dil_worst[lam] = max(dil_worst[lam], r)
                if r > max(1.0, 1.0 / lam) * (1.0 + 1e-6):
                    dil_bad[lam] += 1
    l36_bad = []
    for text in SIX_SPECS:
        s = parse_space(text)
        for zeta in (0.5, 1.0, 2.0):
            for a in (1e-8, 1e-3, 0.4):
                rep = lemma36_check(zeta, a, s)
                if not rep["holds"]:
                    l36_bad.append((text, zeta, a, rep["ratio"]))
    ok = lemma37_ok and sum(dil_bad.values()) == 0 and not l36_bad
    per_lam = ", ".join(f"lambda={lam:g}: {dil_bad[lam]}/{len(SIX_SPECS) * len(fam)} over max{{1,1/lambda}}, worst ratio {dil_worst[lam]:.3f}" for lam in dil_bad)
    return ok, (
        f"T_gamma condition max/min under refinement {({g: round(v, 4) for g, v in flat.items()})}; "
        f"dilation [{per_lam}]; "
        f"characteristic-defect ratio failures {l36_bad or 0}/54"
    )


CRITERIA = {
    1: ("rearrangement oracle and Hardy-Littlewood", criterion_1),
    2: ("Luxemburg consistency", criterion_2),
    3: ("model domain geometry", criterion_3),
    4: ("fundamental function sandwich", criterion_4),
    5: ("domain fundamental function", criterion_5),
    6: ("witness divergence", criterion_6),
    7: ("principal alternative discrimination", criterion_7),
    8: ("operator certificates", criterion_8),
}


def _run(k: int) -> tuple[bool, str, float]:
    t0 = time.perf_counter()
    ok, detail = CRITERIA[k][1]()
    return ok, detail, time.perf_counter() - t0


@pytest.mark.parametrize("k", sorted(CRITERIA), ids=[f"criterion_{k}" for k in sorted(CRITERIA)])
def test_criterion(k, capsys):
    ok, detail, dt = _run(k)
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {k} ({CRITERIA[k][0]}, {dt:.1f} s): {detail}")
    assert dt < 60.0, f"criterion {k} took {dt:.1f} s"
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for k in sorted(CRITERIA):
        ok, detail, dt = _run(k)
        failed += not ok
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {k} ({CRITERIA[k][0]}, {dt:.1f} s): {detail}")
    sys.exit(1 if failed else 0)
