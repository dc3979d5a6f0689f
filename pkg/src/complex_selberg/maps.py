"""Changes of variables behind the main and dual lemmas, as executable checks.

* The Anderson-type map ``u -> (x, y)`` relative to pivots ``z``:
  ``x_a = -prod_p (u_p - z_a) / prod_{b != a} (z_b - z_a)``,
  ``y = sum(u) - sum(z)``.
* The dual map ``z -> w`` relative to ``u``:
  ``w_p = prod_a (z_a - u_p) / prod_{q != p} (u_q - u_p)``, with ``sum(w) = 1``.

Both are rational, so their Jacobians can be checked against holomorphic
finite differences, and the Cauchy determinant against a direct determinant.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Callable

import numpy as np

from .errors import CoincidentPoints

__all__ = [
    "AndersonImage",
    "anderson_forward",
    "anderson_jacobian_closed",
    "anderson_recover",
    "sum_res_identity_check",
    "numeric_complex_jacobian",
    "numeric_real_jacobian",
    "dual_w_map",
    "dual_jacobian_closed",
    "cauchy_det",
    "cauchy_det_direct",
    "match_multisets",
]


def _arr(x) -> np.ndarray:
    return np.asarray(x, dtype=complex).reshape(-1)


def _require_distinct(points, what: str) -> None:
    for a, b in combinations(range(len(points)), 2):
        if points[a] == points[b]:
            raise CoincidentPoints(f"{what} must be pairwise distinct ({what}[{a}] == {what}[{b}])")


@dataclass(frozen=True)
class AndersonImage:
    x: np.ndarray
    y: complex

    def as_vector(self) -> np.ndarray:
        """``(x_1, ..., x_{n-1}, y)``."""
        return np.append(self.x, self.y)


def anderson_forward(u, z) -> AndersonImage:
    u, z = _arr(u), _arr(z)
    if len(u) != len(z) + 1:
        raise ValueError(f"need len(u) == len(z) + 1, got {len(u)} and {len(z)}")
    _require_distinct(z, "z")
    x = np.empty(len(z), dtype=complex)
    for a, za in enumerate(z):
        others = np.delete(z, a)
        x[a] = -np.prod(u - za) / np.prod(others - za)
    return AndersonImage(x, complex(u.sum() - z.sum()))


def anderson_jacobian_closed(u, z) -> complex:
    """Jacobian determinant of ``(u_1..u_n) -> (x_1..x_{n-1}, y)``.

    Equals ``prod_{p<q}(u_p - u_q) / prod_{a<b}(z_b - z_a)`` times the
    orientation sign ``(-1)**((n-1)(n-2)/2)`` of this coordinate order; only
    the modulus enters a change of variables.
    """
    u, z = _arr(u), _arr(z)
    _require_distinct(z, "z")
    n = len(u)
    num = np.prod([u[p] - u[q] for p, q in combinations(range(n), 2)])
    den = np.prod([z[b] - z[a] for a, b in combinations(range(len(z)), 2)])
    sign = -1 if ((n - 1) * (n - 2) // 2) % 2 else 1
    return complex(sign * num / den)


def anderson_recover(image: AndersonImage, z) -> np.ndarray:
    """Recover ``{u_p}`` (as an unordered set) from ``(x, y)``.

    The ``u_p`` are the roots of ``(t - y) prod(t - z_b) - sum_a x_a prod_{b != a}(t - z_b)``.
    """
    z = _arr(z)
    poly = np.polymul([1.0, -image.y], np.poly(z)) if len(z) else np.array([1.0, -image.y])
    for a in range(len(z)):
        term = image.x[a] * np.poly(np.delete(z, a))
        poly = np.polysub(poly, term)
    return np.roots(poly)


def match_multisets(a, b) -> float:
    """Largest distance after greedy nearest pairing of two equal-size point sets."""
    a = sorted(_arr(a), key=lambda v: (v.real, v.imag))
    rest = list(_arr(b))
    if len(a) != len(rest):
        raise ValueError("multisets have different sizes")
    worst = 0.0
    for v in a:
        k = int(np.argmin([abs(v - w) for w in rest]))
        worst = max(worst, abs(v - rest.pop(k)))
    return worst


def sum_res_identity_check(u, z, a: complex) -> float:
    """Relative residual of ``prod(u + a) = (a + y - sum x/(z + a)) prod(z + a)``."""
    u, z = _arr(u), _arr(z)
    img = anderson_forward(u, z)
    lhs = np.prod(u + a)
    if len(z) == 0:
        rhs = a + img.y
    else:
        zp = z + a
        if np.any(zp == 0):
            # a = -z_alpha: the right side's pole cancels, evaluate the limit term directly
            k = int(np.flatnonzero(zp == 0)[0])
            rhs = -img.x[k] * np.prod(np.delete(zp, k))
        else:
            rhs = (a + img.y - np.sum(img.x / zp)) * np.prod(zp)
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return float(abs(lhs - rhs) / scale)


def numeric_complex_jacobian(f: Callable, point, h: float = 1e-5) -> complex:
    """Determinant of the complex Jacobian of a holomorphic map ``C^N -> C^N``.

    Central differences along the real axes (valid for holomorphic maps), with
    one Richardson step combining steps ``h`` and ``h/2``.
    """
    p = _arr(point)
    n = len(p)

    def central(step):
        cols = []
        for k in range(n):
            e = np.zeros(n, dtype=complex)
            e[k] = step
            cols.append((_arr(f(p + e)) - _arr(f(p - e))) / (2 * step))
        return np.column_stack(cols)

    jac = (4 * central(h / 2) - central(h)) / 3
    cond = np.linalg.cond(jac)
    if not np.isfinite(cond) or cond > 1e12:
        warnings.warn(f"Jacobian nearly singular (condition {cond:.3g}); points may be nearly coincident", RuntimeWarning)
    return complex(np.linalg.det(jac))


def numeric_real_jacobian(f: Callable, point, h: float = 1e-5) -> float:
    """Determinant of the real ``2N x 2N`` Jacobian in coordinates ``(Re z_1, Im z_1, ...)``."""
    p = _arr(point)
    n = len(p)

    def real_map(v):
        out = _arr(f(v[0::2] + 1j * v[1::2]))
        return np.column_stack([out.real, out.imag]).reshape(-1)

    v0 = np.column_stack([p.real, p.imag]).reshape(-1)

    def central(step):
        cols = []
        for k in range(2 * n):
            e = np.zeros(2 * n)
            e[k] = step
            cols.append((real_map(v0 + e) - real_map(v0 - e)) / (2 * step))
        return np.column_stack(cols)

    jac = (4 * central(h / 2) - central(h)) / 3
    return float(np.linalg.det(jac))


def dual_w_map(z, u) -> np.ndarray:
    """Residues ``w_p`` of ``prod(t - z_a) / prod(t - u_p)`` at ``t = u_p``."""
    z, u = _arr(z), _arr(u)
    if len(u) != len(z) + 1:
        raise ValueError(f"need len(u) == len(z) + 1, got {len(u)} and {len(z)}")
    _require_distinct(u, "u")
    w = np.empty(len(u), dtype=complex)
    for p, up in enumerate(u):
        w[p] = np.prod(z - up) / np.prod(np.delete(u, p) - up)
    return w


def dual_jacobian_closed(z, u) -> complex:
    """Jacobian determinant of ``(z_1..z_n) -> (w_1..w_n)``.

    ``prod w_p * det[1/(z_a - u_p)]`` collapses to
    ``(-1)**(n(n+1)/2) prod_{a<b}(z_b - z_a) / prod_{p<q<=n+1}(u_p - u_q)``.
    """
    z, u = _arr(z), _arr(u)
    _require_distinct(u, "u")
    n = len(z)
    num = np.prod([z[b] - z[a] for a, b in combinations(range(n), 2)])
    den = np.prod([u[p] - u[q] for p, q in combinations(range(len(u)), 2)])
    sign = -1 if (n * (n + 1) // 2) % 2 else 1
    return complex(sign * num / den)


def cauchy_det(z, u) -> complex:
    """``det[1/(z_a - u_p)]`` by the product formula."""
    z, u = _arr(z), _arr(u)
    if len(z) != len(u):
        raise ValueError("Cauchy determinant needs equally many z and u")
    diff = z[:, None] - u[None, :]
    if np.any(diff == 0):
        raise CoincidentPoints("some z_a equals some u_p")
    num = 1 + 0j
    for a, b in combinations(range(len(z)), 2):
        num *= (z[a] - z[b]) * (u[b] - u[a])
    return complex(num / np.prod(diff))


def cauchy_det_direct(z, u) -> complex:
    z, u = _arr(z), _arr(u)
    return complex(np.linalg.det(1.0 / (z[:, None] - u[None, :])))
