import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import loggamma

from complex_selberg.errors import IndeterminateRatio, PoleAtNonpositiveInteger, PoleInProduct
from complex_selberg.exponents import FieldExponent
from complex_selberg.gamma_field import (
    Classification,
    GammaProduct,
    beta_domain,
    beta_field,
    classify,
    gamma_field,
    gamma_field_array,
    gamma_field_form3_quoted,
    gamma_field_forms,
    lgamma_c,
    snap_exponent,
)


def mp_gamma_field(a: complex, k: int) -> complex:
    """Form 1 in mpmath: i^k Gamma(a) / Gamma(1 - a')."""
    a = mpmath.mpc(a)
    return complex(mpmath.power(1j, k) * mpmath.gamma(a) / mpmath.gamma(1 - (a - k)))


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


# ------------------------------------------------------------------ lgamma


@pytest.mark.parametrize("z, expected", [(0.5, math.log(math.sqrt(math.pi))), (1, 0.0), (4, math.log(6))])
def test_lgamma_values(z, expected):
    assert lgamma_c(z) == pytest.approx(expected, abs=1e-14)


def test_lgamma_against_scipy_on_grid():
    rng = np.random.default_rng(0)
    r = 50 * np.sqrt(rng.random(4000))
    z = r * np.exp(2j * np.pi * rng.random(4000))
    z = z[np.abs(z - np.round(z.real)) > 1e-3]
    mine = lgamma_c(z)
    ref = loggamma(z)
    # same branch, and exp agrees to 1e-12 relative
    assert np.max(np.abs(mine - ref)) < 1e-9
    ratio = np.exp(mine - ref)
    assert np.max(np.abs(ratio - 1)) < 1e-12


def test_lgamma_negative_real_axis():
    x = np.array([-0.5, -1.5, -2.5, -7.3])
    assert np.allclose(np.exp(lgamma_c(x)), [complex(mpmath.gamma(v)) for v in x], rtol=1e-12)


def test_lgamma_pole():
    with pytest.raises(PoleAtNonpositiveInteger):
        lgamma_c(-3)
    with pytest.raises(PoleAtNonpositiveInteger):
        lgamma_c(np.array([1.5, 0.0]))


# ------------------------------------------------------------- gamma_field


def test_gamma_field_examples():
    assert gamma_field(FieldExponent(0.5)).value == pytest.approx(1.0, abs=1e-14)
    assert gamma_field(FieldExponent(1.0, 1)).value == pytest.approx(1j, abs=1e-14)
    quarter = float(mpmath.gamma(0.25) / mpmath.gamma(0.75))
    assert gamma_field(FieldExponent(0.25)).value == pytest.approx(quarter, rel=1e-13)
    assert quarter == pytest.approx(2.958675119, rel=1e-9)
    pole = gamma_field(FieldExponent(0.0))
    assert pole.classification is Classification.POLE and not pole.is_finite


@pytest.mark.parametrize(
    "holo, k, cls",
    [
        (0.0, 0, Classification.POLE),
        (-2.0, 1, Classification.POLE),
        (1.0, 0, Classification.ZERO),
        (3.0, 2, Classification.ZERO),
        (0.0, -1, Classification.REGULAR),  # a = 0, a' = 1
        (2.0, 3, Classification.REGULAR),  # a = 2, a' = -1
        (0.3, 0, Classification.REGULAR),
    ],
)
def test_classification(holo, k, cls):
    assert classify(FieldExponent(holo, k)) is cls


def test_form_two_used_where_form_one_degenerates():
    # a = 0 (form 1 has Gamma(0)), a' = 1: form 2 gives i^(-k) Gamma(1)/Gamma(1) with k = -1
    v = gamma_field(FieldExponent(0.0, -1))
    assert v.classification is Classification.REGULAR
    assert v.value == pytest.approx(1j, abs=1e-14)


def test_snap_within_tolerance():
    e = snap_exponent(FieldExponent(1.0 + 1e-11, 0))
    assert e.holo == 1.0
    assert classify(FieldExponent(1e-12, 0)) is Classification.POLE
    assert classify(FieldExponent(1e-7, 0)) is Classification.REGULAR


def test_gamma_field_against_mpmath():
    rng = np.random.default_rng(1)
    for _ in range(200):
        a = complex(rng.uniform(-5, 5), rng.uniform(-2, 2))
        k = int(rng.integers(-3, 4))
        assert rel(gamma_field(FieldExponent(a, k)).value, mp_gamma_field(a, k)) < 1e-12


def test_three_forms_agree_and_quoted_form_differs_by_parity():
    rng = np.random.default_rng(2)
    for _ in range(200):
        e = FieldExponent(complex(rng.uniform(-3, 3), rng.uniform(0.1, 2)), int(rng.integers(-3, 4)))
        f1, f2, f3 = gamma_field_forms(e)
        assert rel(f1, f2) < 1e-11 and rel(f1, f3) < 1e-11
        assert rel(gamma_field_form3_quoted(e), (-1) ** e.offset * f1) < 1e-11


def test_array_forms_match_scalar():
    holo = np.array([0.3 + 0.1j, -1.7 + 0.4j, 2.2 - 0.5j])
    k = np.array([0, 2, -3])
    for form in (1, 2, 3):
        arr = gamma_field_array(holo, k, form)
        for h, kk, v in zip(holo, k, arr):
            assert rel(v, gamma_field(FieldExponent(h, int(kk))).value) < 1e-12
    with pytest.raises(ValueError):
        gamma_field_array(holo, k, 4)


regular = st.builds(
    lambda re, im, k: FieldExponent(complex(re, im), k),
    st.floats(-4, 4),
    st.floats(0.05, 2),
    st.integers(-3, 3),
)


@given(regular)
def test_recurrence(e):
    shifted = FieldExponent(e.holo + 1, e.offset)
    assert rel(gamma_field(shifted).value, -e.holo * e.anti * gamma_field(e).value) < 1e-10


@given(regular)
def test_reflection(e):
    other = FieldExponent(1 - e.holo, -e.offset)
    assert abs(gamma_field(e).value * gamma_field(other).value - (-1) ** e.offset) < 1e-10


# ---------------------------------------------------------------- beta


def test_beta_examples():
    quarter = float(mpmath.gamma(0.25) / mpmath.gamma(0.75))
    assert beta_field(FieldExponent(0.25), FieldExponent(0.25)) == pytest.approx(quarter**2, rel=1e-12)
    assert quarter**2 == pytest.approx(8.75376, rel=1e-6)
    expected = mp_gamma_field(0.3, 0) * mp_gamma_field(0.2, 0) / mp_gamma_field(0.5, 0)
    assert beta_field(FieldExponent(0.3), FieldExponent(0.2)) == pytest.approx(expected, rel=1e-12)


def test_beta_divergent_at_sum_one():
    with pytest.raises(PoleInProduct):
        beta_field(FieldExponent(0.4), FieldExponent(0.6))


def test_beta_indeterminate():
    # pole over pole: a = 0|0, b = 0|0 gives Gamma(0)^2 / Gamma(0)
    with pytest.raises((IndeterminateRatio, PoleInProduct)):
        beta_field(FieldExponent(0.0), FieldExponent(0.0))
    with pytest.raises(IndeterminateRatio):
        GammaProduct().mul(FieldExponent(0.0)).div(FieldExponent(-1.0)).value()


@given(regular, regular)
def test_beta_symmetric(a, b):
    try:
        ab = beta_field(a, b)
    except (PoleInProduct, IndeterminateRatio):
        return
    assert ab == pytest.approx(beta_field(b, a), rel=1e-12, abs=1e-300)


def test_beta_domain():
    assert beta_domain(FieldExponent(0.3), FieldExponent(0.3))
    assert not beta_domain(FieldExponent(0.6), FieldExponent(0.5))
    assert not beta_domain(FieldExponent(-0.1), FieldExponent(0.3))
    assert beta_domain(FieldExponent.from_floor(0.2, 1), FieldExponent.from_floor(0.3, -1))


def test_product_zero_and_pole_orders():
    assert GammaProduct().mul(FieldExponent(1.0)).value() == 0
    with pytest.raises(PoleInProduct):
        GammaProduct().mul(FieldExponent(0.0)).value()
