import numpy as np
import pytest

import lswkit as lk
from lswkit import jensen


FAMILIES = [
    lk.constant_beta(0.25),
    lk.constant_beta(0.5),
    lk.constant_beta(2.0),
    lk.exponential(),
    lk.oscillating_exponential(0.3),
    lk.oscillating_compact(1.0, 0.2),
    lk.power_tail(1.0),
]


def test_expectation_closed_forms():
    expf = lk.exponential()
    assert jensen.expectation(expf.profile, lambda x: x) == pytest.approx(1.0, abs=2e-5)
    assert jensen.expectation(expf.profile, lambda x: x**2) == pytest.approx(2.0, abs=2e-4)
    got = jensen.expectation(expf.profile, np.sqrt)
    assert got == pytest.approx(np.sqrt(np.pi) / 2.0, abs=1e-4)


def test_truncated_mean_limits():
    fam = lk.constant_beta(0.5)
    assert jensen.truncated_mean(fam.profile, 1e-9) == pytest.approx(0.0, abs=1e-8)
    assert jensen.truncated_mean(fam.profile, 10.0) == pytest.approx(fam.profile.mean, rel=1e-6)


def test_conditional_mean_exponential_memoryless():
    expf = lk.exponential()
    for x in (0.3, 1.0, 4.0):
        assert jensen.conditional_mean(expf.profile, x) == pytest.approx(x + 1.0, rel=2e-4)


def test_conditional_mean_zero_probability():
    fam = lk.constant_beta(0.5)
    with pytest.raises(ValueError):
        jensen.conditional_mean(fam.profile, 5.0)


def test_reverse_jensen_exponential_constant():
    cert = jensen.reverse_jensen(lk.exponential().profile, 0.5)
    # C1 = median/mean = log 2, so C = sqrt(log 2)/2
    assert cert.C_used == pytest.approx(0.41627730557884888, abs=1e-5)
    assert cert.passed and cert.applicable


def test_sharp_jensen_exponential_gap():
    cert = jensen.sharp_jensen(lk.exponential().profile, 0.5)
    # eta = 1 - Gamma(3/2) = 1 - sqrt(pi)/2
    assert cert.eta_used == pytest.approx(0.11377307454724199, abs=1e-5)
    assert cert.passed and cert.applicable


def test_sharp_jensen_inapplicable_without_beta_floor():
    cert = jensen.sharp_jensen(lk.indicator().profile, 0.5)
    assert not cert.applicable


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.name)
def test_certificates_all_families(fam):
    for alpha in (0.25, 0.5):
        rc = jensen.reverse_jensen(fam.profile, alpha)
        assert rc.passed or not rc.applicable, (fam.name, alpha, "reverse")
        sc = jensen.sharp_jensen(fam.profile, alpha)
        assert sc.passed or not sc.applicable, (fam.name, alpha, "sharp")


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.name)
def test_tail_and_conditional_bounds(fam):
    rep = jensen.tail_and_conditional_bounds(fam.profile)
    assert rep.passed, (fam.name, rep.max_violation)


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.name)
def test_quantitative_gap(fam):
    for alpha in (0.25, 0.5):
        rep = jensen.quantitative_jensen_gap(fam.profile, alpha)
        assert rep.passed, (fam.name, alpha, rep.max_violation)


def test_certificate_json_round_trip(tmp_path):
    import json

    cert = jensen.sharp_jensen(lk.exponential().profile, 0.5)
    path = tmp_path / "cert.json"
    cert.to_json(path)
    data = json.loads(path.read_text())
    assert data["alpha"] == 0.5
    assert data["passed"] is True


def test_alpha_out_of_range():
    prof = lk.exponential().profile
    for bad in (0.0, 1.0, 1.5):
        with pytest.raises(ValueError):
            jensen.reverse_jensen(prof, bad)
        with pytest.raises(ValueError):
            jensen.sharp_jensen(prof, bad)
