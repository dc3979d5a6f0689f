"""Exponent pairs of the complex field and single-valued complex powers.

A field exponent is a pair ``a|a'`` of complex numbers whose difference is an
integer.  It is stored as ``(holo, offset)`` with ``holo = a`` and
``offset = a - a'``, so the integrality of the difference is structural.

The power ``z**e`` of a complex number by a field exponent is

    z^a * conj(z)^a' = |z|^(a + a') * exp(i * arg(z) * (a - a'))

which has no branch cut: the phase is carried by the integer ``offset``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from numbers import Integral

import numpy as np

from .errors import ZeroToNonpositivePower

__all__ = [
    "FieldExponent",
    "ONE",
    "TWO",
    "HALF_ONE",
    "ZERO",
    "add",
    "scale_int",
    "shift_scalar",
    "complex_power",
    "log_complex_power",
    "neg_one_pow",
    "i_pow",
    "parse_exponent",
    "format_exponent",
    "as_exponent",
]


@dataclass(frozen=True)
class FieldExponent:
    """The pair ``a|a'`` with ``a' = holo - offset``."""

    holo: complex
    offset: int = 0

    def __post_init__(self):
        if not isinstance(self.offset, Integral):
            raise TypeError(f"offset must be an integer, got {self.offset!r}")
        object.__setattr__(self, "holo", complex(self.holo))
        object.__setattr__(self, "offset", int(self.offset))

    @classmethod
    def symmetric(cls, a: complex) -> FieldExponent:
        """The pair ``a|a``."""
        return cls(a, 0)

    @classmethod
    def from_floor(cls, floor: float, offset: int = 0, imag: float = 0.0) -> FieldExponent:
        """Build the exponent with given floor, offset and common imaginary part."""
        return cls(complex(floor + offset / 2.0, imag), offset)

    @property
    def anti(self) -> complex:
        """The antiholomorphic component ``a'``."""
        return self.holo - self.offset

    @property
    def floor(self) -> float:
        """``Re(a + a') / 2``, the exponent's integrability index."""
        return self.holo.real - self.offset / 2.0

    @property
    def total(self) -> complex:
        """``a + a'``; the exponent of ``|z|``."""
        return 2.0 * self.holo - self.offset

    def __add__(self, other):
        if isinstance(other, FieldExponent):
            return FieldExponent(self.holo + other.holo, self.offset + other.offset)
        if isinstance(other, (int, float, complex)):
            return FieldExponent(self.holo + other, self.offset)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return FieldExponent(-self.holo, -self.offset)

    def __sub__(self, other):
        if isinstance(other, (FieldExponent, int, float, complex)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, n):
        if isinstance(n, Integral):
            return FieldExponent(self.holo * int(n), self.offset * int(n))
        return NotImplemented

    __rmul__ = __mul__

    def __str__(self):
        return format_exponent(self)


ZERO = FieldExponent(0.0, 0)
ONE = FieldExponent(1.0, 0)
TWO = FieldExponent(2.0, 0)
HALF_ONE = FieldExponent(0.5, 0)


def add(x: FieldExponent, y: FieldExponent) -> FieldExponent:
    return x + y


def scale_int(n: int, x: FieldExponent) -> FieldExponent:
    return x * n


def shift_scalar(c: complex, x: FieldExponent) -> FieldExponent:
    """Add ``c`` to both components; the offset is unchanged."""
    return FieldExponent(x.holo + c, x.offset)


def neg_one_pow(e) -> int:
    """``(-1)**e = (-1)**(a - a')``.  Accepts an exponent or a bare integer offset."""
    k = e.offset if isinstance(e, FieldExponent) else int(e)
    return -1 if k % 2 else 1


_I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)


def i_pow(e) -> complex:
    """``i**(a - a')``, exact."""
    k = e.offset if isinstance(e, FieldExponent) else int(e)
    return _I_POWERS[k % 4]


def complex_power(z, e: FieldExponent):
    """Return ``z**e = z^k * |z|^(2 a')`` where ``k = a - a'``.

    Works on scalars and numpy arrays.  At ``z = 0`` the power is 0 when
    ``floor(e) > 0`` and :class:`ZeroToNonpositivePower` is raised otherwise.
    """
    a_anti = e.anti
    k = e.offset
    if np.ndim(z) == 0:
        z = complex(z)
        if z == 0:
            if e.floor > 0:
                return 0j
            raise ZeroToNonpositivePower(f"0 raised to exponent {format_exponent(e)} with floor {e.floor} <= 0")
        modulus = abs(z)
        return z**k * _real_base_power(modulus, 2.0 * a_anti)
    z = np.asarray(z, dtype=complex)
    modulus = np.abs(z)
    zero = modulus == 0
    if zero.any() and e.floor <= 0:
        raise ZeroToNonpositivePower(f"0 raised to exponent {format_exponent(e)} with floor {e.floor} <= 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.power(z, k) * np.exp(2.0 * a_anti * np.log(modulus))
    out[zero] = 0.0
    return out


def _real_base_power(r: float, w: complex) -> complex:
    if w.imag == 0.0:
        return complex(r**w.real)
    return complex(np.exp(w * math.log(r)))


def log_complex_power(z, e: FieldExponent):
    """Logarithm of ``z**e`` accumulated as ``(a + a') log|z| + i k arg z``.

    The imaginary part is not reduced mod 2*pi; only ``exp`` of the result is
    meaningful.  Zero ``z`` gives ``-inf`` (or ``+inf``) real part.
    """
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore"):
        log_mod = np.log(np.abs(z))
    total = e.total
    out = total.real * log_mod + 1j * (total.imag * log_mod)
    if e.offset:
        out = out + 1j * (e.offset * np.angle(z))
    return out if out.ndim else complex(out)


_EXP_RE = re.compile(r"^\s*([^|]+?)\s*(?:\|\s*([+-]?\d+)\s*)?$")


def parse_exponent(text) -> FieldExponent:
    """Parse ``"a_re+a_im i | k"``; ``k`` defaults to 0.

    Examples: ``"0.3"``, ``"0.3|0"``, ``"0.8|1"``, ``"0.3+0.2i|-1"``.
    """
    if isinstance(text, FieldExponent):
        return text
    m = _EXP_RE.match(str(text))
    if not m:
        raise ValueError(f"cannot parse exponent {text!r}")
    holo_text = m.group(1).replace(" ", "").replace("i", "j")
    try:
        holo = complex(holo_text)
    except ValueError as exc:
        raise ValueError(f"cannot parse exponent {text!r}") from exc
    offset = int(m.group(2)) if m.group(2) is not None else 0
    return FieldExponent(holo, offset)


def format_exponent(e: FieldExponent) -> str:
    """Inverse of :func:`parse_exponent`; round-trips floats exactly."""
    re_part = repr(float(e.holo.real))
    if e.holo.imag == 0.0:
        holo = re_part
    else:
        im = float(e.holo.imag)
        sign = "-" if math.copysign(1.0, im) < 0 else "+"
        holo = f"{re_part}{sign}{abs(im)!r}i"
    return f"{holo}|{e.offset}"


def as_exponent(x) -> FieldExponent:
    """Coerce strings, numbers, ``[holo, offset]`` lists or exponents."""
    if isinstance(x, FieldExponent):
        return x
    if isinstance(x, str):
        return parse_exponent(x)
    if isinstance(x, (int, float, complex)):
        return FieldExponent(x, 0)
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return FieldExponent(x[0], int(x[1]))
    raise TypeError(f"cannot interpret {x!r} as a field exponent")
