"""Closed-form right-hand sides of the complex beta-type integrals and their
convergence domains.

Every ``*_rhs`` function is a total meromorphic evaluator built on
:class:`~complex_selberg.gamma_field.GammaProduct`; domain checking is a
separate predicate (:func:`domain_check`).  Sign factors ``(-1)**(...)`` are
computed from integer offsets only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from .errors import CoincidentPoints, ParameterShapeError, PoleInProduct
from .exponents import FieldExponent, as_exponent, complex_power, neg_one_pow
from .gamma_field import GammaProduct, lgamma_c

__all__ = [
    "BetaParams",
    "DirichletParams",
    "LemmaParams",
    "DualParams",
    "TriangularParams",
    "TrapezoidParams",
    "DfaParams",
    "Inequality",
    "DomainVerdict",
    "selberg_real_rhs",
    "dfa_rhs",
    "df_rhs_sin_form",
    "main_rhs",
    "trapezoid_rhs",
    "trapezoid_ladder",
    "ladder_factor",
    "dirichlet_rhs",
    "beta_rhs",
    "lemma_main_rhs",
    "lemma_pair_product",
    "dual_rhs",
    "domain_check",
]


def _exps(xs) -> tuple[FieldExponent, ...]:
    return tuple(as_exponent(x) for x in xs)


def _sum(exps, start=None) -> FieldExponent:
    total = start if start is not None else FieldExponent(0.0, 0)
    for e in exps:
        total = total + e
    return total


def _points(xs) -> tuple[complex, ...]:
    out = []
    for x in xs:
        if isinstance(x, (list, tuple)):
            out.append(complex(x[0], x[1]))
        elif isinstance(x, str):
            out.append(complex(x.replace(" ", "").replace("i", "j")))
        else:
            out.append(complex(x))
    return tuple(out)


# ---------------------------------------------------------------- parameters


@dataclass(frozen=True)
class BetaParams:
    a: FieldExponent
    b: FieldExponent

    def __post_init__(self):
        object.__setattr__(self, "a", as_exponent(self.a))
        object.__setattr__(self, "b", as_exponent(self.b))


@dataclass(frozen=True)
class DirichletParams:
    """Exponents ``a_1 .. a_{n+1}`` of the complex Dirichlet integral over C^n."""

    a: tuple[FieldExponent, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", _exps(self.a))
        if len(self.a) < 2:
            raise ParameterShapeError("Dirichlet integral needs at least two exponents")

    @property
    def n(self) -> int:
        return len(self.a) - 1


@dataclass(frozen=True)
class LemmaParams:
    """Integral over ``u in C^n`` with ``n - 1`` fixed points ``z`` and exponents ``theta``."""

    sigma: FieldExponent
    tau: FieldExponent
    theta: tuple[FieldExponent, ...]
    z: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "sigma", as_exponent(self.sigma))
        object.__setattr__(self, "tau", as_exponent(self.tau))
        object.__setattr__(self, "theta", _exps(self.theta))
        object.__setattr__(self, "z", _points(self.z))
        if len(self.theta) != len(self.z):
            raise ParameterShapeError(f"need one theta per fixed point, got {len(self.theta)} and {len(self.z)}")

    @property
    def n(self) -> int:
        return len(self.z) + 1


@dataclass(frozen=True)
class DualParams:
    """Integral over ``z in C^n`` with ``n + 1`` fixed points ``u``."""

    theta: FieldExponent
    u: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "theta", as_exponent(self.theta))
        object.__setattr__(self, "u", _points(self.u))
        if len(self.u) < 2:
            raise ParameterShapeError("dual integral needs at least two fixed points")

    @property
    def n(self) -> int:
        return len(self.u) - 1


@dataclass(frozen=True)
class TriangularParams:
    """``sigma_j, tau_j`` for ``j = 1..n`` and ``theta[j-1][alpha-1]`` for ``1 <= alpha <= j <= n-1``."""

    n: int
    sigma: tuple[FieldExponent, ...]
    tau: tuple[FieldExponent, ...]
    theta: tuple[tuple[FieldExponent, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "sigma", _exps(self.sigma))
        object.__setattr__(self, "tau", _exps(self.tau))
        object.__setattr__(self, "theta", tuple(_exps(row) for row in self.theta))
        n = self.n
        if n < 1 or len(self.sigma) != n or len(self.tau) != n:
            raise ParameterShapeError(f"need n >= 1 and n values of sigma and tau (n={n})")
        if [len(r) for r in self.theta] != list(range(1, n)):
            raise ParameterShapeError(f"theta must be triangular with rows of length 1..{n - 1}")

    def theta_sum(self, j: int) -> FieldExponent:
        """Sum of row ``j`` of theta (1-based); zero for ``j = 0``."""
        return _sum(self.theta[j - 1]) if j >= 1 else FieldExponent(0.0, 0)


@dataclass(frozen=True)
class TrapezoidParams:
    """Parameters of the trapezoid integral over ``C^m x ... x C^n``.

    ``sigma[i]``, ``tau[i]`` belong to row ``j = m + i``; ``theta[i]`` is row
    ``j = m + i`` (length ``j``) for ``j = m .. n-1``.
    """

    m: int
    n: int
    sigma: tuple[FieldExponent, ...]
    tau: tuple[FieldExponent, ...]
    nu: FieldExponent
    theta: tuple[tuple[FieldExponent, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "sigma", _exps(self.sigma))
        object.__setattr__(self, "tau", _exps(self.tau))
        object.__setattr__(self, "nu", as_exponent(self.nu))
        object.__setattr__(self, "theta", tuple(_exps(row) for row in self.theta))
        m, n = self.m, self.n
        rows = n - m + 1
        if not 1 <= m <= n or len(self.sigma) != rows or len(self.tau) != rows:
            raise ParameterShapeError(f"need 1 <= m <= n and {rows} values of sigma and tau")
        if [len(r) for r in self.theta] != list(range(m, n)):
            raise ParameterShapeError(f"theta rows must have lengths {list(range(m, n))}")

    def sig(self, j: int) -> FieldExponent:
        return self.sigma[j - self.m]

    def ta(self, j: int) -> FieldExponent:
        return self.tau[j - self.m]

    def th(self, j: int) -> tuple[FieldExponent, ...]:
        return self.theta[j - self.m]

    def theta_sum(self, j: int) -> FieldExponent:
        """Row sum of theta for row ``j``; row ``m - 1`` counts as ``m - 1`` copies of ``nu``."""
        if j == self.m - 1:
            return self.nu * (self.m - 1)
        return _sum(self.th(j))


@dataclass(frozen=True)
class DfaParams:
    n: int
    sigma: FieldExponent
    tau: FieldExponent
    theta: FieldExponent

    def __post_init__(self):
        object.__setattr__(self, "sigma", as_exponent(self.sigma))
        object.__setattr__(self, "tau", as_exponent(self.tau))
        object.__setattr__(self, "theta", as_exponent(self.theta))
        if self.n < 1:
            raise ParameterShapeError("n must be >= 1")


# ------------------------------------------------------------------- RHS


def selberg_real_rhs(sigma: complex, tau: complex, theta: complex, n: int) -> complex:
    """Selberg's product ``n! prod Gamma(s+(k-1)t) Gamma(r+(k-1)t) Gamma(kt) / (Gamma(s+r+(n+k-2)t) Gamma(t))``."""
    num, den = [], []
    for k in range(1, n + 1):
        num += [sigma + (k - 1) * theta, tau + (k - 1) * theta]
        den.append(sigma + tau + (n + k - 2) * theta)
        if k > 1:
            num.append(k * theta)
            den.append(theta)
    return math.factorial(n) * _real_gamma_ratio(num, den)


def _is_pole(w: complex) -> bool:
    n = round(w.real)
    return abs(w.imag) <= 1e-9 and abs(w.real - n) <= 1e-9 and n <= 0


def _real_gamma_ratio(num, den) -> complex:
    num = [complex(w) for w in num]
    den = [complex(w) for w in den]
    poles_num = sum(_is_pole(w) for w in num)
    poles_den = sum(_is_pole(w) for w in den)
    if poles_num > poles_den:
        raise PoleInProduct(f"Gamma pole in numerator arguments {num}")
    if poles_num:
        raise PoleInProduct(f"cancelling Gamma poles in {num} / {den}")
    if poles_den:
        return 0j
    log = sum(lgamma_c(w) for w in num) - sum(lgamma_c(w) for w in den)
    return complex(np.exp(log))


def dfa_rhs(p: DfaParams, sign_factor: bool = True) -> complex:
    """Closed form of the extended Dotsenko-Fateev-Aomoto integral over C^n.

    With ``sign_factor`` the product carries ``(-1)**(offset(theta) n(n-1)/2)``.
    Monte Carlo says the integral equals the product without that factor:
    the sign from merging the pair factors of the trapezoid integrand at
    ``m = n`` is already inside ``trapezoid_rhs``.  Both agree whenever
    ``offset(theta) n(n-1)/2`` is even.
    """
    n, s, t, th = p.n, p.sigma, p.tau, p.theta
    prod = GammaProduct()
    for j in range(1, n + 1):
        prod.mul(s + th * (j - 1), t + th * (j - 1))
        prod.div(s + t + th * (n + j - 2))
        if j > 1:
            prod.mul(th * j).div(th)
    sign = neg_one_pow(th.offset * (n * (n - 1) // 2)) if sign_factor else 1
    prod.times(sign * math.factorial(n) * math.pi**n)
    return prod.value()


def df_rhs_sin_form(sigma: complex, tau: complex, theta: complex, n: int) -> complex:
    """The sine-product form: ``(1/n!) prod(sines) * S_n(sigma, tau, theta)**2``."""
    num, den = [], []
    for j in range(1, n + 1):
        num += [sigma + (j - 1) * theta, tau + (j - 1) * theta]
        den.append(sigma + tau + (n + j - 2) * theta)
        if j > 1:
            num.append(j * theta)
            den.append(theta)
    sines_den = [complex(np.sin(np.pi * complex(w))) for w in den]
    if any(abs(v) < 1e-14 for v in sines_den):
        raise PoleInProduct(f"sine factor vanishes in denominator at {den}")
    ratio = np.prod([np.sin(np.pi * complex(w)) for w in num]) / np.prod(sines_den)
    s_n = selberg_real_rhs(sigma, tau, theta, n)
    return complex(ratio * s_n**2 / math.factorial(n))


def _lower_rows_product(prod: GammaProduct, sig, ta, theta_sum, rows) -> None:
    for j in rows:
        prod.mul(sig(j), ta(j)).div(sig(j) + ta(j) + theta_sum(j - 1))


def main_rhs(p: TriangularParams) -> complex:
    """Closed form of the integral over the triangular configuration space C^1 x ... x C^n."""
    n = p.n
    prod = GammaProduct()
    k_total = 0
    for row in p.theta:
        prod.mul(*row)
        k_total += sum(e.offset for e in row)
    _lower_rows_product(prod, lambda j: p.sigma[j - 1], lambda j: p.tau[j - 1], p.theta_sum, range(1, n + 1))
    const = neg_one_pow(k_total) * math.pi ** (n * (n + 1) // 2) * math.prod(math.factorial(j) for j in range(1, n + 1))
    return prod.times(const).value()


def trapezoid_rhs(p: TrapezoidParams) -> complex:
    """Closed form of the integral over ``C^m x C^(m+1) x ... x C^n``."""
    m, n, nu = p.m, p.n, p.nu
    prod = GammaProduct()
    sm, tm = p.sig(m), p.ta(m)
    for j in range(1, m):
        prod.mul(sm + nu * (m - j), tm + nu * (m - j), nu * (j + 1))
        prod.div(sm + tm + nu * (2 * m - j - 1), nu)
    k_total = nu.offset * (m * (m - 1) // 2)
    for row in p.theta:
        prod.mul(*row)
        k_total += sum(e.offset for e in row)
    _lower_rows_product(prod, p.sig, p.ta, p.theta_sum, range(m, n + 1))
    power = n * (n + 1) // 2 - m * (m - 1) // 2
    const = neg_one_pow(k_total) * math.pi**power * math.prod(math.factorial(j) for j in range(m, n + 1))
    return prod.times(const).value()


def trapezoid_ladder(p: TrapezoidParams) -> TriangularParams:
    """Triangular parameters obtained by filling rows ``1..m-1`` with ``nu``.

    ``main_rhs(trapezoid_ladder(p)) == ladder_factor(p) * trapezoid_rhs(p)``.
    """
    m, n, nu = p.m, p.n, p.nu
    sigma = [p.sig(m) + nu * (m - j) for j in range(1, m)] + list(p.sigma)
    tau = [p.ta(m) + nu * (m - j) for j in range(1, m)] + list(p.tau)
    theta = [(nu,) * j for j in range(1, m)] + [tuple(r) for r in p.theta]
    return TriangularParams(n, tuple(sigma), tuple(tau), tuple(theta))


def ladder_factor(p: TrapezoidParams) -> complex:
    """``prod_{k<m} pi^k k! Gamma(nu)^(k+1) / Gamma((k+1) nu)``: the integrals over rows ``1..m-1``."""
    prod = GammaProduct()
    for k in range(1, p.m):
        prod.mul(*([p.nu] * (k + 1))).div(p.nu * (k + 1))
        prod.times(math.pi**k * math.factorial(k))
    return prod.value()


def beta_rhs(p: BetaParams) -> complex:
    """``B(a, b)``, the value of ``(1/pi) * int z**(a-1) (1-z)**(b-1)`` over C."""
    return GammaProduct().mul(p.a, p.b).div(p.a + p.b).value()


def dirichlet_rhs(p: DirichletParams) -> complex:
    prod = GammaProduct().mul(*p.a).div(_sum(p.a))
    return prod.times(math.pi**p.n).value()


def _check_distinct(points, extra=()) -> None:
    pts = list(points)
    for a, b in combinations(pts, 2):
        if a == b:
            raise CoincidentPoints(f"points must be pairwise distinct, {a} repeated")
    for a in pts:
        if a in extra:
            raise CoincidentPoints(f"point {a} coincides with one of {extra}")


def lemma_pair_product(theta, z, form: str = "ordered") -> complex:
    """The ``z``-difference factor of the main lemma's closed form.

    ``form="ordered"``: ``prod_{a != b} (z_b - z_a)**(theta_a - 1/2)``.
    ``form="paired"``: ``sign * prod_{a < b} (z_b - z_a)**(theta_a + theta_b - 1)``
    with ``sign = prod_b (-1)**(offset(theta_b) * (b - 1))``.
    """
    theta = _exps(theta)
    z = _points(z)
    out = 1 + 0j
    if form == "ordered":
        for a, b in permutations(range(len(z)), 2):
            out *= complex_power(z[b] - z[a], theta[a] - 0.5)
        return out
    if form == "paired":
        k = 0
        for a, b in combinations(range(len(z)), 2):
            out *= complex_power(z[b] - z[a], theta[a] + theta[b] - 1.0)
            k += theta[b].offset
        return neg_one_pow(k) * out
    raise ValueError(f"unknown form {form!r}")


def lemma_main_rhs(p: LemmaParams) -> complex:
    """Closed form of the main lemma as a function of the fixed points ``z``."""
    _check_distinct(p.z, extra=(0j, 1 + 0j))
    prod = GammaProduct().mul(p.sigma, p.tau, *p.theta).div(_sum(p.theta, p.sigma + p.tau))
    k_total = sum(e.offset for e in p.theta)
    prod.times(neg_one_pow(k_total) * math.pi**p.n * math.factorial(p.n))
    value = prod.value()
    for th, z in zip(p.theta, p.z):
        value *= complex_power(z, p.sigma + th - 1.0) * complex_power(1 - z, p.tau + th - 1.0)
    return value * lemma_pair_product(p.theta, p.z, "ordered")


def dual_rhs(p: DualParams) -> complex:
    """Closed form of the dual lemma as a function of the fixed points ``u``."""
    _check_distinct(p.u)
    n, th = p.n, p.theta
    prod = GammaProduct().mul(*([th] * (n + 1))).div(th * (n + 1))
    value = prod.times(math.factorial(n) * math.pi**n).value()
    for a, b in permutations(range(n + 1), 2):
        value *= complex_power(p.u[a] - p.u[b], th - 0.5)
    return value


# ------------------------------------------------------------------ domains


@dataclass(frozen=True)
class Inequality:
    """One floor inequality ``lhs op bound``; ``slack > 0`` iff it holds."""

    name: str
    lhs: float
    op: str
    bound: float
    note: str = ""

    @property
    def slack(self) -> float:
        return self.lhs - self.bound if self.op == ">" else self.bound - self.lhs

    @property
    def passed(self) -> bool:
        return self.slack > 0

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "lhs": self.lhs,
            "op": self.op,
            "bound": self.bound,
            "slack": self.slack,
            "passed": self.passed,
        }
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class DomainVerdict:
    inequalities: tuple[Inequality, ...]

    @property
    def passed(self) -> bool:
        return all(q.passed for q in self.inequalities)

    @property
    def failed(self) -> tuple[Inequality, ...]:
        return tuple(q for q in self.inequalities if not q.passed)

    def to_list(self) -> list[dict]:
        return [q.to_dict() for q in self.inequalities]


def _gt(name, e, bound=0.0, note=""):
    return Inequality(f"floor({name}) > {bound:g}", e.floor, ">", bound, note)


def _lt(name, e, bound=1.0, note=""):
    return Inequality(f"floor({name}) < {bound:g}", e.floor, "<", bound, note)


def _beta_domain(p: BetaParams):
    return [_gt("a", p.a), _gt("b", p.b), _lt("a+b", p.a + p.b)]


def _dirichlet_domain(p: DirichletParams):
    out = [_gt(f"a{j + 1}", a) for j, a in enumerate(p.a)]
    out.append(_lt("sum a", _sum(p.a)))
    return out


def _lemma_domain(p: LemmaParams):
    out = [_gt("sigma", p.sigma), _gt("tau", p.tau)]
    out += [_gt(f"theta{a + 1}", th) for a, th in enumerate(p.theta)]
    out.append(_lt("sigma+tau+sum theta", _sum(p.theta, p.sigma + p.tau)))
    return out


def _dual_domain(p: DualParams):
    return [_gt("theta", p.theta), _lt("theta", p.theta, 1.0 / (p.n + 1))]


def _triangular_domain(p: TriangularParams):
    out = []
    for j in range(1, p.n + 1):
        out += [_gt(f"sigma{j}", p.sigma[j - 1]), _gt(f"tau{j}", p.tau[j - 1])]
    for j, row in enumerate(p.theta, start=1):
        out += [_gt(f"theta{j}{a + 1}", th) for a, th in enumerate(row)]
    for j in range(1, p.n + 1):
        e = p.sigma[j - 1] + p.tau[j - 1] + p.theta_sum(j - 1)
        out.append(_lt(f"sigma{j}+tau{j}+sum theta{j - 1}", e))
    return out


def _trapezoid_domain(p: TrapezoidParams):
    m, n, nu = p.m, p.n, p.nu
    out = []
    for j in range(m, n + 1):
        out += [_gt(f"sigma{j}", p.sig(j)), _gt(f"tau{j}", p.ta(j))]
    for j in range(m, n):
        out += [_gt(f"theta{j}{a + 1}", th) for a, th in enumerate(p.th(j))]
    for j in range(m + 1, n + 1):
        out.append(_lt(f"sigma{j}+tau{j}+sum theta{j - 1}", p.sig(j) + p.ta(j) + p.theta_sum(j - 1)))
    out += [
        _gt("nu", nu),
        _lt(f"{m}nu", nu * m),
        _lt(f"sigma{m}+tau{m}+{2 * (m - 1)}nu", p.sig(m) + p.ta(m) + nu * (2 * (m - 1))),
    ]
    return out


def _dfa_domain(p: DfaParams):
    n, s, t, th = p.n, p.sigma, p.tau, p.theta
    return [
        _gt("sigma", s),
        _gt("tau", t),
        _gt("theta", th, -1.0 / n),
        _gt(f"sigma+{n - 1}theta", s + th * (n - 1)),
        _gt(f"tau+{n - 1}theta", t + th * (n - 1)),
        _lt(f"sigma+tau+{n - 1}theta", s + t + th * (n - 1)),
        _lt(f"sigma+tau+{2 * (n - 1)}theta", s + t + th * (2 * (n - 1))),
        _gt("theta", th, 0.0, note="needed by the derivation through the trapezoid integral"),
    ]


_DOMAINS = {
    BetaParams: _beta_domain,
    DirichletParams: _dirichlet_domain,
    LemmaParams: _lemma_domain,
    DualParams: _dual_domain,
    TriangularParams: _triangular_domain,
    TrapezoidParams: _trapezoid_domain,
    DfaParams: _dfa_domain,
}


def domain_check(spec) -> DomainVerdict:
    """Evaluate every convergence inequality of an identity.

    Accepts an ``IdentitySpec`` (anything with a ``params`` attribute) or a
    bare parameter record.
    """
    params = getattr(spec, "params", spec)
    try:
        builder = _DOMAINS[type(params)]
    except KeyError:
        raise TypeError(f"no domain for {type(params).__name__}") from None
    return DomainVerdict(tuple(builder(params)))
