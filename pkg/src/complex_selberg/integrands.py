"""Point evaluators for the left-hand-side integrands.

Every integrand here is a product of single-valued powers ``L(z)**e`` of affine
forms ``L`` in the configuration coordinates.  An integrand is compiled into a
:class:`ProductIntegrand`: identical affine forms are merged (``L**a L**b =
L**(a+b)`` holds exactly for these powers; ``(-L)**e = (-1)**e L**e``), then
it can be evaluated either as a direct product of powers or by accumulating
``log|L|`` and ``arg L`` and exponentiating once.

Configurations are flat complex vectors (or batches of shape ``(N, dim)``):

* DFA, dual lemma, Dirichlet, main lemma: the coordinates in order;
* triangular space ``C^1 x ... x C^n``: row ``j`` occupies slots
  ``j(j-1)/2 .. j(j-1)/2 + j - 1``;
* trapezoid ``C^m x ... x C^n``: rows ``m..n`` stacked in order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from .closed_form import (
    BetaParams,
    DfaParams,
    DirichletParams,
    DualParams,
    LemmaParams,
    TrapezoidParams,
    TriangularParams,
)
from .errors import ParameterShapeError, SingularPoint
from .exponents import ONE, FieldExponent, complex_power, neg_one_pow

__all__ = [
    "Affine",
    "Factor",
    "ProductIntegrand",
    "TriangularConfig",
    "TrapezoidConfig",
    "triangular_index",
    "trapezoid_index",
    "beta_integrand",
    "dfa_integrand",
    "main_integrand",
    "trapezoid_integrand",
    "dirichlet_integrand",
    "lemma_integrand",
    "dual_integrand",
    "build_integrand",
    "LOG_PATH_MIN_REAL_DIM",
]

LOG_PATH_MIN_REAL_DIM = 7


@dataclass(frozen=True)
class Affine:
    """``const + sum(coeff * x[idx])`` with sorted, nonzero integer coefficients."""

    const: complex
    terms: tuple[tuple[int, int], ...]

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        out = self.const + np.zeros(x.shape[:-1], dtype=complex)
        for idx, c in self.terms:
            out = out + c * x[..., idx] if c != 1 else out + x[..., idx]
        return out

    def __neg__(self):
        return Affine(-self.const, tuple((i, -c) for i, c in self.terms))

    def canonical(self) -> tuple[Affine, bool]:
        """Return ``(form, flipped)`` with ``form`` the representative of ``{L, -L}``."""
        lead = self.terms[0][1] if self.terms else self.const.real or self.const.imag
        if lead < 0:
            return -self, True
        return self, False


def var(i: int) -> Affine:
    return Affine(0j, ((i, 1),))


def const(c: complex) -> Affine:
    return Affine(complex(c), ())


def lin(c: complex, *terms: tuple[int, int]) -> Affine:
    """Affine form ``c + sum(coeff * x[i])``; zero coefficients are dropped."""
    acc: dict[int, int] = {}
    for i, k in terms:
        acc[i] = acc.get(i, 0) + k
    return Affine(complex(c), tuple(sorted((i, k) for i, k in acc.items() if k)))


@dataclass(frozen=True)
class Factor:
    form: Affine
    exponent: FieldExponent


def _is_trivial(e: FieldExponent) -> bool:
    return e.offset == 0 and e.holo == 0


@dataclass(frozen=True)
class ProductIntegrand:
    """``scale * sign * prod form**exponent`` over configurations in ``C^dim``.

    Instances are picklable and carry no mutable state, so they can be shipped
    to worker processes.
    """

    dim: int
    factors: tuple[Factor, ...]
    scale: complex = 1 + 0j
    name: str = ""

    @classmethod
    def build(cls, dim: int, raw: list[tuple[Affine, FieldExponent]], scale: complex = 1, name: str = ""):
        merged: dict[Affine, FieldExponent] = {}
        sign_k = 0
        for form, e in raw:
            if not form.terms:
                scale *= complex_power(form.const, e)
                continue
            form, flipped = form.canonical()
            if flipped:
                sign_k += e.offset
            merged[form] = merged.get(form, FieldExponent(0.0, 0)) + e
        factors = tuple(Factor(f, e) for f, e in merged.items() if not _is_trivial(e))
        return cls(dim, factors, complex(scale) * neg_one_pow(sign_k), name)

    # -------------------------------------------------------------- eval

    def _coerce(self, z):
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.dim:
            raise ParameterShapeError(f"{self.name or 'integrand'} expects {self.dim} coordinates, got {z.shape[-1]}")
        return z

    def bases(self, z) -> list:
        """Values of every factor's affine form at ``z``."""
        z = self._coerce(z)
        return [f.form(z) for f in self.factors]

    def log_value(self, z, bases=None):
        """Complex log of the integrand (without ``scale``), accumulated factor by factor.

        Zero loci give ``-inf`` real part, non-removable singularities ``+inf``.
        ``bases`` may supply the factor values (see :meth:`bases`) when the
        caller knows some of them more accurately than evaluating the forms.
        """
        if bases is None:
            bases = self.bases(z)
        shape = np.shape(bases[0]) if bases else np.shape(self._coerce(z))[:-1]
        log_mod_acc = np.zeros(shape)
        phase_acc = np.zeros(shape)
        zero = np.zeros(shape, dtype=bool)
        blow = np.zeros(shape, dtype=bool)
        for f, base in zip(self.factors, bases):
            modulus = np.abs(base)
            at_zero = modulus == 0
            with np.errstate(divide="ignore"):
                log_mod = np.log(modulus)
            total = f.exponent.total
            log_mod = np.where(at_zero, 0.0, log_mod)
            log_mod_acc += total.real * log_mod
            if total.imag:
                phase_acc += total.imag * log_mod
            if f.exponent.offset:
                phase_acc += f.exponent.offset * np.angle(base)
            if at_zero.any():
                zero |= at_zero & (f.exponent.floor > 0)
                blow |= at_zero & (f.exponent.floor <= 0)
        out = log_mod_acc + 1j * phase_acc
        out = np.where(blow, np.inf + 0j, np.where(zero, -np.inf + 0j, out))
        return out if out.ndim else complex(out)

    def value_log_path(self, z):
        lv = self.log_value(z)
        lv = np.asarray(lv)
        out = self.scale * np.exp(lv)
        out = np.where(np.isneginf(lv.real), 0j, out)
        out = np.where(np.isposinf(lv.real), complex(np.inf, 0), out)
        return out if out.ndim else complex(out)

    def value_direct(self, z):
        """Direct product of :func:`complex_power` factors (singular points raise)."""
        z = self._coerce(z)
        out = self.scale + np.zeros(z.shape[:-1], dtype=complex)
        for f in self.factors:
            base = f.form(z)
            if np.any(base == 0) and f.exponent.floor <= 0:
                raise SingularPoint(f"factor {f.form} vanishes with exponent floor {f.exponent.floor:g}")
            out = out * complex_power(base, f.exponent)
        return out if out.ndim else complex(out)

    def __call__(self, z, path: str | None = None):
        """Evaluate at one configuration (or a batch).

        ``path`` is ``"direct"`` or ``"log"``; by default the log path is used
        from ``LOG_PATH_MIN_REAL_DIM`` real dimensions on.
        """
        if path is None:
            path = "log" if 2 * self.dim >= LOG_PATH_MIN_REAL_DIM else "direct"
        if path == "direct":
            return self.value_direct(z)
        out = self.value_log_path(z)
        if np.any(np.isinf(np.real(out))):
            raise SingularPoint(f"{self.name or 'integrand'} evaluated at a non-removable singularity")
        return out


# ------------------------------------------------------------------ layouts


def triangular_index(j: int, alpha: int) -> int:
    """Flat slot of ``z_{j alpha}`` (1-based ``j`` and ``alpha``) in ``C^1 x ... x C^n``."""
    return j * (j - 1) // 2 + alpha - 1


def trapezoid_index(m: int, j: int, alpha: int) -> int:
    """Flat slot of ``z_{j alpha}`` in ``C^m x ... x C^n``."""
    return (j * (j - 1) - m * (m - 1)) // 2 + alpha - 1


@dataclass(frozen=True)
class TriangularConfig:
    """A point of ``C^1 x C^2 x ... x C^n``; ``z[j-1]`` is row ``j`` of length ``j``."""

    z: tuple[tuple[complex, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(complex(v) for v in r) for r in self.z)
        if [len(r) for r in rows] != list(range(1, len(rows) + 1)):
            raise ParameterShapeError("triangular configuration rows must have lengths 1, 2, ..., n")
        object.__setattr__(self, "z", rows)

    @property
    def n(self) -> int:
        return len(self.z)

    def flat(self) -> np.ndarray:
        return np.array([v for r in self.z for v in r], dtype=complex)


@dataclass(frozen=True)
class TrapezoidConfig:
    """A point of ``C^m x ... x C^n``; ``z[i]`` is row ``m + i``."""

    m: int
    z: tuple[tuple[complex, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(complex(v) for v in r) for r in self.z)
        if [len(r) for r in rows] != list(range(self.m, self.m + len(rows))):
            raise ParameterShapeError(f"trapezoid rows must have lengths {self.m}, {self.m + 1}, ...")
        object.__setattr__(self, "z", rows)

    def flat(self) -> np.ndarray:
        return np.array([v for r in self.z for v in r], dtype=complex)


# ---------------------------------------------------------------- builders


def _beta(p: BetaParams) -> ProductIntegrand:
    x = var(0)
    raw = [(x, p.a - ONE), (lin(1, (0, -1)), p.b - ONE)]
    return ProductIntegrand.build(1, raw, scale=1 / math.pi, name="beta")


def _dfa(p: DfaParams) -> ProductIntegrand:
    n = p.n
    raw = []
    for j in range(n):
        raw += [(var(j), p.sigma - ONE), (lin(1, (j, -1)), p.tau - ONE)]
    for i, j in combinations(range(n), 2):
        raw.append((lin(0, (i, 1), (j, -1)), p.theta * 2))
    return ProductIntegrand.build(n, raw, name="dfa")


def _rows_block(raw, idx, j, sig_j, sig_next, tau_j, tau_next, theta_row):
    """Factors of row ``j`` against row ``j + 1`` (shared by the triangular and trapezoid integrands)."""
    for a in range(1, j + 1):
        th = theta_row[a - 1]
        x = idx(j, a)
        raw.append((var(x), sig_j - sig_next - th))
        raw.append((lin(1, (x, -1)), tau_j - tau_next - th))
        for p_ in range(1, j + 2):
            raw.append((lin(0, (x, 1), (idx(j + 1, p_), -1)), th - ONE))
        for b in range(1, j + 1):
            if b != a:
                raw.append((lin(0, (x, 1), (idx(j, b), -1)), -(th - ONE)))


def _top_row(raw, idx, n, sig_n, tau_n):
    for p_ in range(1, n + 1):
        x = idx(n, p_)
        raw += [(var(x), sig_n - ONE), (lin(1, (x, -1)), tau_n - ONE)]
    for p_, q in combinations(range(1, n + 1), 2):
        raw.append((lin(0, (idx(n, p_), 1), (idx(n, q), -1)), ONE))


def _main(p: TriangularParams) -> ProductIntegrand:
    n = p.n
    raw = []
    for j in range(1, n):
        _rows_block(raw, triangular_index, j, p.sigma[j - 1], p.sigma[j], p.tau[j - 1], p.tau[j], p.theta[j - 1])
    _top_row(raw, triangular_index, n, p.sigma[n - 1], p.tau[n - 1])
    return ProductIntegrand.build(n * (n + 1) // 2, raw, name="theorem1")


def _trapezoid(p: TrapezoidParams) -> ProductIntegrand:
    m, n = p.m, p.n

    def idx(j, a):
        return trapezoid_index(m, j, a)

    raw = []
    for j in range(m, n):
        _rows_block(raw, idx, j, p.sig(j), p.sig(j + 1), p.ta(j), p.ta(j + 1), p.th(j))
    _top_row(raw, idx, n, p.sig(n), p.ta(n))
    half = p.nu - 0.5
    for a, b in permutations(range(1, m + 1), 2):
        raw.append((lin(0, (idx(m, b), 1), (idx(m, a), -1)), half))
    dim = (n * (n + 1) - m * (m - 1)) // 2
    return ProductIntegrand.build(dim, raw, name="theorem2")


def _dirichlet(p: DirichletParams) -> ProductIntegrand:
    n = p.n
    raw = [(var(j), p.a[j] - ONE) for j in range(n)]
    raw.append((lin(1, *[(j, -1) for j in range(n)]), p.a[n] - ONE))
    return ProductIntegrand.build(n, raw, name="dirichlet")


def _lemma(p: LemmaParams) -> ProductIntegrand:
    n = p.n
    raw = []
    for q in range(n):
        raw += [(var(q), p.sigma - ONE), (lin(1, (q, -1)), p.tau - ONE)]
        for th, z in zip(p.theta, p.z):
            raw.append((lin(-z, (q, 1)), th - ONE))
    for q, r in combinations(range(n), 2):
        raw.append((lin(0, (q, 1), (r, -1)), ONE))
    return ProductIntegrand.build(n, raw, name="lemma_main")


def _dual(p: DualParams) -> ProductIntegrand:
    n = p.n
    raw = []
    for a in range(n):
        for u in p.u:
            raw.append((lin(-u, (a, 1)), p.theta - ONE))
    for a, b in combinations(range(n), 2):
        raw.append((lin(0, (b, 1), (a, -1)), ONE))
    return ProductIntegrand.build(n, raw, name="dual")


_BUILDERS = {
    BetaParams: _beta,
    DfaParams: _dfa,
    TriangularParams: _main,
    TrapezoidParams: _trapezoid,
    DirichletParams: _dirichlet,
    LemmaParams: _lemma,
    DualParams: _dual,
}


def build_integrand(params) -> ProductIntegrand:
    """Compile the integrand matching a parameter record."""
    try:
        return _BUILDERS[type(params)](params)
    except KeyError:
        raise TypeError(f"no integrand for {type(params).__name__}") from None


def _flat(cfg):
    if isinstance(cfg, (TriangularConfig, TrapezoidConfig)):
        return cfg.flat()
    return np.asarray(cfg, dtype=complex)


def beta_integrand(p: BetaParams, z, path=None):
    """``z**(a-1) (1-z)**(b-1) / pi``."""
    return _beta(p)(np.reshape(np.asarray(z, dtype=complex), np.shape(z) + (1,)), path)


def dfa_integrand(p: DfaParams, z, path=None):
    return _dfa(p)(_flat(z), path)


def main_integrand(p: TriangularParams, cfg, path=None):
    return _main(p)(_flat(cfg), path)


def trapezoid_integrand(p: TrapezoidParams, cfg, path=None):
    return _trapezoid(p)(_flat(cfg), path)


def dirichlet_integrand(p: DirichletParams, t, path=None):
    return _dirichlet(p)(_flat(t), path)


def lemma_integrand(p: LemmaParams, u, path=None):
    return _lemma(p)(_flat(u), path)


def dual_integrand(p: DualParams, z, path=None):
    return _dual(p)(_flat(z), path)
