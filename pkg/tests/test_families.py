import numpy as np
import pytest

import lswkit as lk
from lswkit.families import make_family


ALL_BUILTINS = [
    lk.constant_beta(0.25),
    lk.constant_beta(0.5),
    lk.constant_beta(2.0),
    lk.exponential(),
    lk.indicator(),
    lk.oscillating_exponential(0.3),
    lk.oscillating_compact(1.0, 0.2),
    lk.power_tail(1.0),
]


@pytest.mark.parametrize("fam", ALL_BUILTINS, ids=lambda f: f.name)
def test_grid_values_match_closed_form(fam):
    if fam.w_exact is None:
        return
    np.testing.assert_allclose(
        fam.profile.values[:-1], fam.w_exact(fam.profile.grid[:-1]), rtol=1e-10, atol=1e-300
    )


@pytest.mark.parametrize("fam", ALL_BUILTINS, ids=lambda f: f.name)
def test_mean_matches(fam):
    if fam.mean_exact is None:
        return
    assert fam.profile.mean == pytest.approx(fam.mean_exact, rel=2e-5)


def test_constant_beta_discrete_estimate():
    for b in (0.25, 0.5, 1.0, 2.0):
        fam = lk.constant_beta(b)
        est = lk.beta_from_profile(fam.profile)
        ok = ~est.low_confidence
        bulk = fam.profile.values[: len(est.values)] >= fam.profile.w0 * 2.0**-30
        assert np.max(np.abs(est.values[ok & bulk] - b)) < 5e-3, b


def test_oscillating_exponential_beta_formula():
    fam = lk.oscillating_exponential(0.2)
    xs = np.linspace(0.0, 15.0, 400)
    # finite differences of the closed-form h reproduce beta_exact
    d = 1e-5
    h = fam.h_exact
    num = (h(xs + d) - 2.0 * h(xs) + h(xs - d)) / d**2 * h(xs)
    den = ((h(xs + d) - h(xs - d)) / (2.0 * d)) ** 2
    np.testing.assert_allclose(num / den, fam.beta_exact(xs), atol=1e-5)


def test_power_tail_constant_beta():
    fam = lk.power_tail(0.5)
    est = lk.beta_from_profile(fam.profile)
    ok = ~est.low_confidence
    assert np.max(np.abs(est.values[ok] - 3.0)) < 0.02


def test_indicator_profile():
    fam = lk.indicator()
    assert fam.profile.mass == pytest.approx(1.0, abs=1e-14)
    assert fam.profile.sup_x == 1.0


def test_quantile_grid_properties():
    grid = lk.quantile_grid(lambda q: -np.log(q), n=512, deep=30)
    assert grid[0] == 0.0
    assert np.all(np.diff(grid) > 0)
    # the deepest node reaches the 2^-30 survival level
    assert grid[-1] == pytest.approx(30.0 * np.log(2.0), rel=1e-10)


def test_make_family_dispatch():
    fam = make_family("constant-beta", beta=0.5)
    assert fam.name.startswith("constant-beta")
    with pytest.raises(lk.ConfigError):
        make_family("no-such-family")


def test_parameter_validation():
    with pytest.raises(lk.ConfigError):
        lk.constant_beta(-1.0)
    with pytest.raises(lk.ConfigError):
        lk.oscillating_exponential(0.7)
    with pytest.raises(lk.ConfigError):
        lk.power_tail(0.0)
    with pytest.raises(lk.ConfigError):
        lk.oscillating_compact(-0.5, 0.1)


def test_self_similar_family_seed():
    fam = make_family("self-similar", alpha=0.05)
    assert fam.profile.mass == pytest.approx(1.0, rel=1e-6)
    assert fam.beta_exact(0.0) == pytest.approx(0.05 * 1.035241154488942, abs=1e-6)
