import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import lswkit as lk
from lswkit import cellquad, jensen


def random_profile(draw_floats, n):
    """Strictly decreasing survival data on a positive grid from raw draws."""
    gaps = np.array(draw_floats, float)[:n]
    grid = np.concatenate(([0.0], np.cumsum(gaps)))
    drops = np.array(draw_floats, float)[n:2 * n]
    w = 1.0 + np.concatenate(([0.0], np.cumsum(-drops)))
    w -= w[-1]  # compact support: end exactly at zero
    return lk.SurvivalProfile(grid, w / w[0])


profile_strategy = st.builds(
    random_profile,
    st.lists(st.floats(min_value=1e-3, max_value=2.0), min_size=16, max_size=16),
    st.just(8),
)


@settings(max_examples=60, deadline=None)
@given(profile_strategy)
def test_mass_between_trivial_bounds(prof):
    # h(0) = integral of w over the support, bracketed by endpoint rectangles
    assert 0.0 < prof.mass <= prof.w0 * prof.sup_x + 1e-12


@settings(max_examples=60, deadline=None)
@given(profile_strategy)
def test_suffix_mass_decreasing(prof):
    xs = np.linspace(0.0, prof.sup_x, 40)
    h = prof.h_at(xs)
    assert np.all(np.diff(h) <= 1e-12)
    assert h[0] == pytest.approx(prof.mass, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(profile_strategy, st.floats(min_value=0.05, max_value=0.95))
def test_quantile_round_trip(prof, q):
    x = prof.quantile(q)
    assert prof.w_at(x) == pytest.approx(q * prof.w0, rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(profile_strategy)
def test_dilate_scales_mass_linearly(prof):
    # dilate maps X to lam X: survival values are unchanged, lengths scale
    lam = 1.7
    scaled = prof.dilate(lam)
    assert scaled.mass == pytest.approx(lam * prof.mass, rel=1e-12)
    assert scaled.w0 == pytest.approx(prof.w0, rel=1e-12)
    assert scaled.sup_x == pytest.approx(lam * prof.sup_x, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(profile_strategy, st.floats(min_value=0.1, max_value=0.9))
def test_truncated_mean_below_mean(prof, frac):
    y = frac * prof.sup_x
    tm = jensen.truncated_mean(prof, y)
    assert -1e-12 <= tm <= prof.mean + 1e-12


@settings(max_examples=60, deadline=None)
@given(profile_strategy, st.floats(min_value=0.05, max_value=0.6))
def test_conditional_mean_dominates_threshold(prof, frac):
    x = frac * prof.sup_x
    cm = jensen.conditional_mean(prof, x)
    assert cm >= x - 1e-12
    assert cm <= prof.sup_x + 1e-12


@settings(max_examples=60, deadline=None)
@given(profile_strategy, st.floats(min_value=0.1, max_value=0.9))
def test_moment_interpolates_between_bounds(prof, alpha):
    # Jensen upper bound and the trivial positivity lower bound
    m = prof.moment(alpha)
    assert 0.0 < m <= prof.mean ** alpha + 1e-12


@settings(max_examples=60, deadline=None)
@given(profile_strategy)
def test_power_cells_positive_and_additive(prof):
    x, w = prof.grid, prof.values
    cells = cellquad.power_cells(x, w, -1.0 / 3.0)
    assert np.all(cells >= 0.0)
    total = cellquad.power_total(x, w, -1.0 / 3.0)
    assert total == pytest.approx(float(np.sum(cells)), rel=1e-12)
    suffix = cellquad.power_suffix(x, w, -1.0 / 3.0)
    assert suffix[0] == pytest.approx(total, rel=1e-12)
    assert np.all(np.diff(suffix) <= 1e-15)


@settings(max_examples=60, deadline=None)
@given(profile_strategy)
def test_energy_upper_bound(prof):
    # x^(-1/3) >= sup_x^(-1/3) on the support gives a floor; the rectangle
    # bound w <= w0 gives a ceiling via the explicit primitive
    e = prof.energy()
    floor = prof.mass * prof.sup_x ** (-1.0 / 3.0)
    ceil = prof.w0 * prof.sup_x ** (2.0 / 3.0)
    assert floor - 1e-12 <= e <= ceil + 1e-12


@settings(max_examples=40, deadline=None)
@given(profile_strategy)
def test_expectation_monotone_in_integrand(prof):
    lo = jensen.expectation(prof, lambda x: np.sqrt(x))
    hi = jensen.expectation(prof, lambda x: np.sqrt(x) + 1.0)
    assert hi == pytest.approx(lo + 1.0, rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(profile_strategy)
def test_beta_envelope_brackets_values(prof):
    b = lk.beta_from_profile(prof)
    ok = ~b.low_confidence
    if np.count_nonzero(ok) < 4:
        return
    lo, hi = lk.beta_envelope(prof)
    assert lo <= float(np.min(b.values[ok])) + 1e-9
    assert hi >= float(np.max(b.values[ok])) - 1e-9
