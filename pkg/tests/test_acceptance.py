"""End-to-end acceptance checks, one test per advertised guarantee.

Each test pins the tolerance it certifies; module-scoped fixtures share the
long solver runs between criteria.
"""
import numpy as np
import pytest

import lswkit as lk
from lswkit import jensen
from lswkit.lsw_solver import (
    SolverConfig, advance_global, coarsening_identity_check, beta_along_flow,
    g_profile, normalized_view, dyadic_report,
)
from lswkit.linear_model import run_linear_model, stability_check
from lswkit.map_iteration import linear_map, cube_root_map, iterate, beta_transform
from lswkit.profiles import beta_from_profile, regular_variation_exponent
from lswkit.self_similar import build_profile, g_alpha_profile


# Λ(T)/T regression floors over T in [5, 20], frozen at first validated
# build from a step-refinement study (observed minima 0.3289 and 0.5316)
LAMBDA_FLOOR = {"exponential": 0.30, "power_tail": 0.48}


@pytest.fixture(scope="module")
def exp_run():
    fam = lk.exponential()
    return fam, advance_global(fam.profile, 20.0, SolverConfig(delta=0.05, tol=1e-6),
                               beta0=fam.beta_exact, snapshot_times=(20.0,))


@pytest.fixture(scope="module")
def exp_run_half_step():
    fam = lk.exponential()
    return fam, advance_global(fam.profile, 20.0, SolverConfig(delta=0.025, tol=1e-6),
                               beta0=fam.beta_exact)


@pytest.fixture(scope="module")
def power_run():
    fam = lk.power_tail(1.0)
    return fam, advance_global(fam.profile, 20.0, SolverConfig(delta=0.05, tol=1e-6),
                               beta0=fam.beta_exact, snapshot_times=(20.0,))


@pytest.fixture(scope="module")
def half_beta_run():
    fam = lk.constant_beta(0.5)
    return fam, advance_global(fam.profile, 20.0, SolverConfig(delta=0.05, tol=1e-6),
                               beta0=fam.beta_exact,
                               snapshot_times=(0.0, 2.5, 5.0, 10.0, 20.0))


@pytest.fixture(scope="module")
def stationary_run():
    fam = lk.make_family("self-similar", alpha=0.05)
    rate = float(fam.beta_exact(0.0))
    t_final = float((np.exp(2.0 * rate) - 1.0) / rate)
    res = advance_global(fam.profile, t_final, SolverConfig(delta=0.05, tol=1e-5),
                         beta0=fam.beta_exact, snapshot_times=(t_final,))
    return fam, rate, res


@pytest.fixture(scope="module")
def linear_run():
    fam = lk.constant_beta(0.5)
    return fam, run_linear_model(fam.profile, 200.0, beta0=fam.beta_exact)


def test_c01_constant_beta_round_trip():
    for beta in (0.25, 0.5, 1.0, 2.0):
        fam = lk.constant_beta(beta)
        est = beta_from_profile(fam.profile)
        prof = fam.profile
        bulk = (~est.low_confidence) & (prof.w_at(est.grid) >= prof.w0 * 2.0**-30)
        idx = np.flatnonzero(bulk)
        spacing = 0.5 * (est.grid[np.minimum(idx + 1, len(est.grid) - 1)]
                         - est.grid[np.maximum(idx - 1, 0)])
        err = np.abs(est.values[idx] - beta)
        assert np.all(err <= np.maximum(10.0 * spacing, 1e-2)), beta


def test_c02_self_similar_identities():
    for alpha in (0.02, 0.05, 0.10, 0.14):
        prof = build_profile(alpha)
        assert prof.z4_residual <= 1e-5, alpha
        g = g_alpha_profile(prof)
        assert abs(g.g0 - alpha * prof.gamma) <= 1e-4, alpha
        assert abs(g.g_end - g.g_end_exact) <= 1e-4, alpha
        assert np.max(np.maximum(-np.diff(g.values), 0.0)) <= 1e-8, alpha


def test_c03_self_similar_stationarity(stationary_run):
    fam, rate, res = stationary_run
    snap = res.snapshots[-1]
    y, ws = normalized_view(snap)
    yy = np.linspace(0.0, max(float(y[-1]), float(fam.profile.sup_x)), 8192)
    sup = float(np.max(np.abs(np.interp(yy, y, ws, right=0.0) - fam.profile.w_at(yy))))
    assert sup <= 1e-2
    assert abs(res.trace.beta0[-1] - rate) <= 1e-2


def test_c04_coarsening_identity(exp_run, power_run):
    for _, res in (exp_run, power_run):
        rep = coarsening_identity_check(res.trace)
        assert rep["frac_within_2pct"] >= 0.95


def test_c05_conservation(exp_run, power_run, half_beta_run, stationary_run):
    runs = [exp_run[1], power_run[1], half_beta_run[1], stationary_run[2]]
    for res in runs:
        m = np.array(res.trace.mass)
        assert np.max(np.abs(m - m[0])) / m[0] <= 1e-4


def test_c06_upper_bounds(exp_run, power_run, half_beta_run):
    for fam, res in (exp_run, power_run, half_beta_run):
        a = res.trace.as_arrays()
        sup_b = beta_from_profile(fam.profile).sup
        bound = a["Lambda"][0] + sup_b * a["t"]
        assert np.max(a["Lambda"] - bound) <= 1e-9 * a["Lambda"][0], fam.name
        assert np.max(a["E"] - a["Lambda"] ** (-1.0 / 3.0)) <= 1e-9, fam.name


def test_c07_lower_bound_floor(exp_run, power_run):
    for key, (_, res) in (("exponential", exp_run), ("power_tail", power_run)):
        a = res.trace.as_arrays()
        win = (a["t"] >= 5.0) & (a["t"] <= 20.0)
        rate = a["Lambda"][win] / a["t"][win]
        assert float(np.min(rate)) >= LAMBDA_FLOOR[key], key


def test_c08_picard_contraction(exp_run, exp_run_half_step):
    _, res = exp_run
    assert max(p.iterations for p in res.picard) <= 10
    assert all(r < 1.0 for p in res.picard for r in p.ratios)
    fc = max(p.first_correction for p in res.picard)
    fc_half = max(p.first_correction for p in exp_run_half_step[1].picard)
    # cube-root step scaling predicts a 2^(1/3) reduction, allowed factor 2
    ratio = fc / fc_half
    assert 2.0 ** (1.0 / 3.0) / 2.0 <= ratio <= 2.0 ** (1.0 / 3.0) * 2.0


def test_c09_linear_model_stability(linear_run):
    fam, res = linear_run
    rep = stability_check(fam.profile, res)
    assert rep.applicable
    assert abs(rep.slope - 0.5) <= 0.05
    # beta(0,t) is transported exactly through the affine label map
    a = res.trace.as_arrays()
    np.testing.assert_allclose(a["beta0"], 0.5, atol=1e-6)


def test_c10_monotonicity_suite(half_beta_run):
    fam, res = half_beta_run
    worst = 0.0
    for snap in res.snapshots:
        tb, _ = beta_along_flow(snap, fam.profile, res.ensemble.beta0)
        bv = tb.values[~tb.low_confidence]
        worst = max(worst, float(np.max(np.maximum(-np.diff(bv), 0.0), initial=0.0)))
        gx, gv = g_profile(snap)
        worst = max(worst, float(np.max(-gv, initial=0.0)))
        worst = max(worst, float(np.max(np.diff(gv[gx < 0.9 * gx[-1]]), initial=0.0)))
    assert worst <= 1e-6


def test_c11_dyadic_ratio(half_beta_run):
    _, res = half_beta_run
    rep = dyadic_report(res.snapshots)
    last = rep["snapshots"][-1]["ratios"]
    finite = last[np.isfinite(last)]
    assert len(finite) >= 10
    assert abs(finite[9] - 2.0) <= 0.1
    # per-level ratios never decrease as rescaled time advances
    n = min(min(len(r["ratios"]) for r in rep["snapshots"]), 10)
    stack = np.array([r["ratios"][:n] for r in rep["snapshots"]])
    assert np.min(np.diff(stack, axis=0)) >= -1e-6


def test_c12_map_iteration():
    fam = lk.exponential()
    hist = iterate(fam.profile, cube_root_map(), 0.5, 1.0, 100)
    sb = np.array(hist.sup_beta)
    assert np.all(np.diff(sb) <= 1e-8)
    tb = beta_transform(fam.profile, cube_root_map())
    base = beta_from_profile(fam.profile)
    ok = ~tb.low_confidence
    assert np.max(tb.values[ok] - base.at(cube_root_map()(tb.grid[ok]))) <= 1e-8
    lb = beta_transform(fam.profile, linear_map(0.5))
    ok = ~lb.low_confidence
    assert np.max(np.abs(lb.values[ok] - base.at(linear_map(0.5)(lb.grid[ok])))) <= 1e-6


def test_c13_jensen_suite():
    families = [lk.constant_beta(0.25), lk.constant_beta(0.5), lk.constant_beta(2.0),
                lk.exponential(), lk.oscillating_exponential(0.3),
                lk.oscillating_compact(1.0, 0.2), lk.power_tail(1.0), lk.indicator()]
    for fam in families:
        for alpha in (0.25, 0.5):
            rc = jensen.reverse_jensen(fam.profile, alpha)
            assert rc.passed or not rc.applicable, (fam.name, alpha)
            sc = jensen.sharp_jensen(fam.profile, alpha)
            assert sc.passed or not sc.applicable, (fam.name, alpha)
        rep = jensen.tail_and_conditional_bounds(fam.profile)
        assert rep.passed, fam.name
        gap = jensen.quantitative_jensen_gap(fam.profile, 0.5)
        assert gap.passed, fam.name
    est = regular_variation_exponent(lk.constant_beta(0.5).profile)
    assert abs(est.exponent - 1.0) <= 0.05
