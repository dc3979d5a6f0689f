import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from complex_selberg.errors import ZeroToNonpositivePower
from complex_selberg.exponents import (
    FieldExponent,
    add,
    as_exponent,
    complex_power,
    format_exponent,
    i_pow,
    log_complex_power,
    neg_one_pow,
    parse_exponent,
    scale_int,
    shift_scalar,
)

finite = st.floats(min_value=-3, max_value=3, allow_nan=False)
offsets = st.integers(min_value=-4, max_value=4)
exponents = st.builds(lambda re, im, k: FieldExponent(complex(re, im), k), finite, finite, offsets)
nonzero = st.builds(complex, finite, finite).filter(lambda z: abs(z) > 1e-3)


def close(a, b, rel=1e-12):
    return abs(a - b) <= rel * max(abs(a), abs(b), 1e-300)


def test_arithmetic_examples():
    e = add(FieldExponent(0.3), FieldExponent(0.2))
    assert e.holo == pytest.approx(0.5) and e.offset == 0

    theta = FieldExponent(0.1, -1)  # 0.1 | 1.1
    assert theta.anti == pytest.approx(1.1)
    tripled = scale_int(3, theta)
    assert tripled.holo == pytest.approx(0.3)
    assert tripled.anti == pytest.approx(3.3)
    assert tripled.offset == -3

    shifted = shift_scalar(-0.5, FieldExponent(0.4))
    assert shifted.holo == pytest.approx(-0.1) and shifted.anti == pytest.approx(-0.1)
    assert shifted.offset == 0


def test_floor_uses_stored_fields():
    e = FieldExponent(0.8 + 0.3j, 1)
    assert e.anti == pytest.approx(-0.2 + 0.3j)
    assert e.floor == pytest.approx(0.3)
    assert FieldExponent.from_floor(0.3, 1).holo == pytest.approx(0.8)


def test_offset_must_be_integer():
    with pytest.raises(TypeError):
        FieldExponent(0.3, 0.5)


@pytest.mark.parametrize(
    "z, e, expected",
    [
        (2, FieldExponent(1.0), 4),
        (1j, FieldExponent(1.0, 1), 1j),
        (2j, FieldExponent(0.5, 1), 1j),
    ],
)
def test_complex_power_examples(z, e, expected):
    assert close(complex_power(z, e), expected)


def test_complex_power_at_zero():
    assert complex_power(0, FieldExponent(0.3)) == 0
    with pytest.raises(ZeroToNonpositivePower):
        complex_power(0, FieldExponent(-0.2))
    out = complex_power(np.array([0, 1j]), FieldExponent(0.3))
    assert out[0] == 0


def test_sign_helpers():
    assert neg_one_pow(3) == -1
    assert neg_one_pow(FieldExponent(0.2, 0)) == 1
    assert i_pow(2) == -1
    assert [i_pow(k) for k in range(-1, 4)] == [-1j, 1, 1j, -1, -1j]


@given(nonzero, exponents)
def test_power_matches_polar_definition(z, e):
    # |z|^(a + a') * exp(i arg(z) (a - a'))
    expected = cmath.exp(e.total * math.log(abs(z))) * cmath.exp(1j * cmath.phase(z) * e.offset)
    assert close(complex_power(z, e), expected, 1e-11)


@given(nonzero, exponents)
def test_power_inverse(z, e):
    assert close(complex_power(z, e) * complex_power(z, -e), 1.0)


@given(nonzero, exponents, exponents)
def test_power_additive(z, e1, e2):
    assert close(complex_power(z, add(e1, e2)), complex_power(z, e1) * complex_power(z, e2), 1e-11)


@given(nonzero)
def test_power_one_is_modulus_squared(z):
    assert close(complex_power(z, FieldExponent(1.0)), abs(z) ** 2)


@given(nonzero, nonzero, exponents)
def test_reversed_difference_sign(z, w, e):
    if abs(z - w) < 1e-3:
        return
    lhs = complex_power(z - w, e) * complex_power(w - z, e)
    rhs = neg_one_pow(e) * complex_power(z - w, e * 2)
    assert close(lhs, rhs, 1e-11)


@given(nonzero, exponents)
def test_log_power_exponentiates_to_power(z, e):
    assert close(cmath.exp(log_complex_power(z, e)), complex_power(z, e), 1e-11)


@settings(max_examples=200)
@given(exponents)
def test_text_round_trip(e):
    assert parse_exponent(format_exponent(e)) == e


@pytest.mark.parametrize(
    "text, holo, k",
    [("0.3", 0.3, 0), ("0.3|0", 0.3, 0), ("0.8|1", 0.8, 1), ("0.3+0.2i|-1", 0.3 + 0.2j, -1), (" 1.5 | 2 ", 1.5, 2)],
)
def test_parse_forms(text, holo, k):
    e = parse_exponent(text)
    assert e.holo == holo and e.offset == k


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_exponent("abc|1")
    with pytest.raises(ValueError):
        parse_exponent("0.3|x")


def test_as_exponent_coercions():
    assert as_exponent([0.3, 1]) == FieldExponent(0.3, 1)
    assert as_exponent(0.25) == FieldExponent(0.25, 0)
    with pytest.raises(TypeError):
        as_exponent(object())
