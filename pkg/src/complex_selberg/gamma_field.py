"""Gamma and Beta functions of the complex field.

``gamma_field(a|a')`` has three equal closed forms::

    i^(a-a') Gamma(a) / Gamma(1-a')
    i^(a'-a) Gamma(a') / Gamma(1-a)
    i^(a'-a) / pi * Gamma(a) Gamma(a') sin(pi a)

The third is often quoted with ``sin(pi a')``; that version carries an extra
``(-1)^(a-a')`` and agrees with the others only on even offsets
(:func:`gamma_field_form3_quoted` keeps it for comparison).

It has a (simple) pole where both ``a`` and ``a'`` are nonpositive integers and
a (simple) zero where both are positive integers.  Everywhere else one of the
first two forms is a ratio of finite, nonzero Gamma values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IndeterminateRatio, PoleAtNonpositiveInteger, PoleInProduct
from .exponents import FieldExponent, i_pow

__all__ = [
    "Classification",
    "FieldGammaValue",
    "GammaProduct",
    "lgamma_c",
    "gamma_field",
    "gamma_field_forms",
    "gamma_field_form3_quoted",
    "gamma_field_array",
    "beta_field",
    "beta_domain",
    "classify",
    "snap_exponent",
]

INTEGER_TOL = 1e-9

LOG_PI = math.log(math.pi)
HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_2m / (2m (2m-1)) for m = 1..9
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
)
_STIRLING_MIN = 15.0


def _sinpi(z):
    """``sin(pi z)`` with exact reduction of the real part."""
    n = np.round(z.real)
    sign = np.where(np.mod(n, 2) == 0, 1.0, -1.0)
    return sign * np.sin(np.pi * (z - n))


def _lgamma_right(z):
    """Principal log-Gamma for ``Re z >= 0.5`` (vectorized)."""
    shift = np.where(np.abs(z) < _STIRLING_MIN, np.ceil(np.maximum(_STIRLING_MIN - z.real, 0.0)), 0.0)
    w = z + shift
    log_prod = np.zeros_like(z)
    for k in range(int(shift.max(initial=0.0))):
        active = shift > k
        log_prod = log_prod + np.where(active, np.log(np.where(active, z + k, 1.0)), 0.0)
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    for c in reversed(_STIRLING):
        series = series * inv2 + c
    series = series * inv
    return (w - 0.5) * np.log(w) - w + HALF_LOG_2PI + series - log_prod


def lgamma_c(z):
    """Principal-branch ``log Gamma(z)`` for complex ``z``.

    Uses Stirling's series after upward recurrence for ``Re z >= 1/2`` and the
    reflection formula below.  Accepts scalars or arrays.

    Raises:
        PoleAtNonpositiveInteger: if any ``z`` is a nonpositive integer.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any((z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))):
        raise PoleAtNonpositiveInteger(f"log-Gamma pole at {z[(z.imag == 0) & (z.real <= 0)]}")
    out = np.empty_like(z)
    right = z.real >= 0.5
    if right.any():
        out[right] = _lgamma_right(z[right])
    left = ~right
    if left.any():
        zl = z[left]
        # Continuity fix for the principal branch, as in Hare (1997).
        branch = 2j * np.pi * np.floor(0.5 * zl.real + 0.25)
        branch = np.where(zl.imag < 0, -branch, branch)
        branch = np.where(zl.imag == 0, 0.0, branch)
        refl = LOG_PI - np.log(_sinpi(zl)) - _lgamma_right(1.0 - zl) + branch
        real_axis = zl.imag == 0
        refl = np.where(real_axis, refl.real + 1j * _real_axis_phase(zl.real), refl)
        out[left] = refl
    return complex(out[0]) if scalar else out


def _real_axis_phase(x):
    # Gamma(x) < 0 on (-2m-1, -2m); principal log has imaginary part -pi*ceil(-x).
    return -np.pi * np.ceil(-x)


class Classification(str, enum.Enum):
    REGULAR = "regular"
    POLE = "pole"
    ZERO = "zero"


@dataclass(frozen=True)
class FieldGammaValue:
    """Value of the complex-field Gamma function.  ``value`` is ``nan`` at a pole."""

    value: complex
    classification: Classification

    @property
    def is_finite(self) -> bool:
        return self.classification is not Classification.POLE


def _near_integer(w: complex) -> int | None:
    n = round(w.real)
    if abs(w.imag) <= INTEGER_TOL and abs(w.real - n) <= INTEGER_TOL:
        return int(n)
    return None


def snap_exponent(e: FieldExponent) -> FieldExponent:
    """Snap the holomorphic part onto an integer when within tolerance."""
    n = _near_integer(e.holo)
    if n is None or e.holo == n:
        return e
    return FieldExponent(complex(n), e.offset)


def classify(e: FieldExponent) -> Classification:
    e = snap_exponent(e)
    n = _near_integer(e.holo)
    if n is None:
        return Classification.REGULAR
    n_anti = n - e.offset
    if n <= 0 and n_anti <= 0:
        return Classification.POLE
    if n >= 1 and n_anti >= 1:
        return Classification.ZERO
    return Classification.REGULAR


def _log_gamma_field(e: FieldExponent) -> tuple[complex, complex]:
    """``(unit, log_abs)`` with gamma_field(e) = unit * exp(log_abs) at a regular point."""
    a = e.holo
    a_anti = e.anti
    n = _near_integer(a)
    if n is not None and n <= 0:
        # form 2: a nonpositive integer, a' a positive integer
        return i_pow(-e.offset), lgamma_c(a_anti) - lgamma_c(1.0 - a)
    return i_pow(e.offset), lgamma_c(a) - lgamma_c(1.0 - a_anti)


def gamma_field(e: FieldExponent) -> FieldGammaValue:
    """Gamma function of the complex field, total over all of the exponent lattice."""
    e = snap_exponent(e)
    cls = classify(e)
    if cls is Classification.POLE:
        return FieldGammaValue(complex(math.nan, math.nan), cls)
    if cls is Classification.ZERO:
        return FieldGammaValue(0j, cls)
    unit, log_abs = _log_gamma_field(e)
    return FieldGammaValue(unit * np.exp(log_abs), cls)


def gamma_field_forms(e: FieldExponent) -> tuple[complex, complex, complex]:
    """The three closed forms evaluated independently (regular, non-integer points only)."""
    a, a_anti, k = e.holo, e.anti, e.offset
    form1 = i_pow(k) * np.exp(lgamma_c(a) - lgamma_c(1.0 - a_anti))
    form2 = i_pow(-k) * np.exp(lgamma_c(a_anti) - lgamma_c(1.0 - a))
    form3 = i_pow(-k) / math.pi * np.exp(lgamma_c(a) + lgamma_c(a_anti)) * complex(_sinpi(np.asarray(a)))
    return complex(form1), complex(form2), complex(form3)


def gamma_field_form3_quoted(e: FieldExponent) -> complex:
    """``i^(a'-a) / pi * Gamma(a) Gamma(a') sin(pi a')``; equals ``(-1)^k`` times the true value."""
    a, a_anti = e.holo, e.anti
    return complex(i_pow(-e.offset) / math.pi * np.exp(lgamma_c(a) + lgamma_c(a_anti)) * _sinpi(np.asarray(a_anti)))


def gamma_field_array(holo, offset, form: int = 1):
    """Vectorized closed form ``form`` (1, 2 or 3) over arrays of non-integer exponents."""
    a = np.asarray(holo, dtype=complex)
    k = np.asarray(offset, dtype=np.int64)
    a_anti = a - k
    unit = np.array(_I_TABLE)[k % 4]
    unit_neg = np.array(_I_TABLE)[(-k) % 4]
    if form == 1:
        return unit * np.exp(lgamma_c(a) - lgamma_c(1.0 - a_anti))
    if form == 2:
        return unit_neg * np.exp(lgamma_c(a_anti) - lgamma_c(1.0 - a))
    if form == 3:
        return unit_neg / np.pi * np.exp(lgamma_c(a) + lgamma_c(a_anti)) * _sinpi(a)
    raise ValueError(f"unknown form {form}")


_I_TABLE = (1 + 0j, 1j, -1 + 0j, -1j)


@dataclass
class GammaProduct:
    """Accumulates ``prod gamma_field(num) / prod gamma_field(den)`` with pole/zero bookkeeping.

    Regular factors are combined in log space; singular ones only change the
    net order.  A positive net order means the product vanishes, a negative one
    is a pole, and a zero net order with cancelling singularities is reported
    as indeterminate.
    """

    unit: complex = 1 + 0j
    log_abs: complex = 0j
    order: int = 0
    singular: int = 0
    scale: complex = 1 + 0j
    labels: list = field(default_factory=list)

    def _factor(self, e: FieldExponent, sign: int):
        e = snap_exponent(e)
        cls = classify(e)
        if cls is Classification.REGULAR:
            unit, log_abs = _log_gamma_field(e)
            if sign > 0:
                self.unit *= unit
                self.log_abs += log_abs
            else:
                self.unit /= unit
                self.log_abs -= log_abs
            return
        self.singular += 1
        self.labels.append((str(e), cls.value, "num" if sign > 0 else "den"))
        step = 1 if cls is Classification.ZERO else -1
        self.order += sign * step

    def mul(self, *exps: FieldExponent) -> GammaProduct:
        for e in exps:
            self._factor(e, +1)
        return self

    def div(self, *exps: FieldExponent) -> GammaProduct:
        for e in exps:
            self._factor(e, -1)
        return self

    def times(self, c: complex) -> GammaProduct:
        self.scale *= c
        return self

    def value(self) -> complex:
        if self.order > 0:
            return 0j
        if self.order < 0:
            raise PoleInProduct(f"Gamma product diverges (net order {self.order}): {self.labels}")
        if self.singular:
            raise IndeterminateRatio(f"Gamma product has cancelling singular factors: {self.labels}")
        return complex(self.scale * self.unit * np.exp(self.log_abs))


def beta_field(a: FieldExponent, b: FieldExponent) -> complex:
    """``gamma_field(a) gamma_field(b) / gamma_field(a + b)``.

    A zero in the denominator (e.g. ``a + b = 1|1``) or a pole in the numerator
    raises :class:`PoleInProduct`; 0/0 and inf/inf raise :class:`IndeterminateRatio`.
    """
    return GammaProduct().mul(a, b).div(a + b).value()


def beta_domain(a: FieldExponent, b: FieldExponent) -> bool:
    """Absolute-convergence domain of the complex beta integral."""
    return a.floor > 0 and b.floor > 0 and (a + b).floor < 1
