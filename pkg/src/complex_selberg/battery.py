"""The verification battery behind ``suite``.

Two kinds of checks:

* Monte Carlo cases: an :class:`IdentitySpec`, a sample budget and a z-score
  gate, run through :func:`mc_engine.verify`.
* Residual checks: exact algebraic identities evaluated at random points,
  reporting the largest relative residual against a threshold.

Every random draw is derived from the suite seed, so a battery run is a pure
function of ``(level, seed)``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .closed_form import (
    BetaParams,
    DfaParams,
    DirichletParams,
    DualParams,
    LemmaParams,
    TrapezoidParams,
    TriangularParams,
    df_rhs_sin_form,
    dfa_rhs,
    ladder_factor,
    main_rhs,
    trapezoid_ladder,
    trapezoid_rhs,
)
from .exponents import FieldExponent
from .gamma_field import gamma_field, gamma_field_array
from .identities import IdentitySpec
from .maps import (
    anderson_forward,
    anderson_jacobian_closed,
    cauchy_det,
    cauchy_det_direct,
    dual_jacobian_closed,
    dual_w_map,
    numeric_complex_jacobian,
    numeric_real_jacobian,
    sum_res_identity_check,
)
from .mc_engine import verify

__all__ = [
    "LEVELS",
    "McCase",
    "ResidualCheck",
    "CheckResult",
    "mc_cases",
    "residual_checks",
    "run_battery",
    "run_residual",
    "run_mc",
    "derive_seed",
]

F = FieldExponent.from_floor

# samples per Monte Carlo case at each level; ``None`` keeps the case's own budget
LEVELS = {"smoke": 40_000, "full": None}
SMOKE_CHUNKS = 2
FULL_CHUNKS = 8


def derive_seed(seed: int, *key: int) -> int:
    """A 63-bit seed for sub-task ``key`` of a run seeded with ``seed``."""
    state = np.random.SeedSequence(seed, spawn_key=tuple(key)).generate_state(2, dtype=np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1]))


@dataclass(frozen=True)
class McCase:
    criterion: int
    name: str
    spec: IdentitySpec
    samples: int
    gate: float = 4.0


@dataclass(frozen=True)
class ResidualCheck:
    criterion: int
    name: str
    threshold: float
    run: Callable[[np.random.Generator], tuple[float, int]]


@dataclass
class CheckResult:
    criterion: int
    name: str
    kind: str
    passed: bool
    record: dict
    wall_seconds: float = field(default=0.0, compare=False)

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {"criterion": self.criterion, "name": self.name, "kind": self.kind, "passed": self.passed}
        out.update(self.record)
        if include_timing:
            out["wall_seconds"] = self.wall_seconds
        return out


def mc_cases() -> list[McCase]:
    """Monte Carlo cases with the sample budgets of the full battery."""

    def case(criterion, name, params, samples, gate=4.0):
        return McCase(criterion, name, IdentitySpec.from_params(params), samples, gate)

    return [
        case(3, "beta_symmetric", BetaParams("0.3", "0.3"), 10**7),
        case(3, "beta_asymmetric", BetaParams("0.2", "0.5"), 10**7),
        case(3, "beta_near_edge", BetaParams("0.45", "0.4"), 10**7),
        case(3, "beta_complex", BetaParams("0.3+0.2i", "0.25-0.1i"), 10**7),
        case(3, "beta_offsets", BetaParams(F(0.2, 1), F(0.3, -1)), 10**7),
        case(4, "dirichlet_n2", DirichletParams(("0.2", "0.3", "0.2")), 10**7),
        case(4, "dirichlet_n3", DirichletParams(("0.2", "0.15", "0.2", "0.1")), 10**7),
        case(5, "lemma_n2", LemmaParams("0.3", "0.25", ("0.2",), ((0.4, 0.3),)), 2 * 10**7),
        case(
            5,
            "lemma_n3",
            LemmaParams("0.2", "0.25", ("0.15", "0.2"), ((0.4, 0.3), (-0.5, 0.8))),
            2 * 10**7,
        ),
        case(6, "dual_n1", DualParams("0.3", ((0, 0), (1, 0))), 2 * 10**7),
        case(6, "dual_n2", DualParams("0.2", ((0, 0), (1, 0), (0.3, 0.9))), 2 * 10**7),
        case(7, "theorem1_n2", TriangularParams(2, ("0.3", "0.25"), ("0.25", "0.3"), (("0.2",),)), 2 * 10**7),
        case(
            7,
            "theorem1_n3",
            TriangularParams(3, ("0.3", "0.25", "0.2"), ("0.25", "0.3", "0.2"), (("0.2",), ("0.15", "0.15"))),
            5 * 10**7,
            gate=5.0,
        ),
        case(
            8,
            "theorem2_m1_n2",
            TrapezoidParams(1, 2, ("0.3", "0.25"), ("0.25", "0.3"), "0.15", (("0.2",),)),
            2 * 10**7,
        ),
        case(8, "theorem2_m2_n2", TrapezoidParams(2, 2, ("0.3",), ("0.3",), "0.15", ()), 2 * 10**7),
        case(9, "dfa_canonical", DfaParams(2, "0.3", "0.3", "0.15"), 2 * 10**7),
        case(9, "dfa_offset", DfaParams(2, F(0.3, 1), "0.3", "0.15"), 2 * 10**7),
    ]


# ------------------------------------------------------------ residual checks


def _relerr(a: complex, b: complex) -> float:
    """Symmetric relative difference."""
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def _random_regular_exponents(rng, count, re_span=5.0, im_span=2.0, max_offset=3):
    """``(holo, offset)`` arrays of random exponents away from the integer lattice."""
    draw = 2 * count
    holo = rng.uniform(-re_span, re_span, draw) + 1j * rng.uniform(-im_span, im_span, draw)
    offset = rng.integers(-max_offset, max_offset + 1, draw)

    def gap(w):
        return np.abs(w.real - np.round(w.real))

    keep = (np.abs(holo.imag) > 0.05) | (np.minimum(gap(holo), gap(holo - offset)) > 0.05)
    return holo[keep][:count], offset[keep][:count]


def _points(rng, n: int, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.normal(size=n) + 1j * rng.normal(size=n))


def _max_rel(a, b) -> float:
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))


def check_gamma_three_forms(rng, count: int = 10_000) -> tuple[float, int]:
    holo, k = _random_regular_exponents(rng, count)
    f1, f2, f3 = (gamma_field_array(holo, k, form) for form in (1, 2, 3))
    return max(_max_rel(f1, f2), _max_rel(f1, f3)), len(holo)


def check_gamma_recurrence(rng, count: int = 10_000) -> tuple[float, int]:
    """``gamma_field(a + 1) = -a a' gamma_field(a)``, vectorized plus a scalar spot sample."""
    holo, k = _random_regular_exponents(rng, count)
    lhs = gamma_field_array(holo + 1, k)
    rhs = -holo * (holo - k) * gamma_field_array(holo, k)
    worst = _max_rel(lhs, rhs)
    for h, kk in zip(holo[:100], k[:100]):
        e = FieldExponent(complex(h), int(kk))
        worst = max(worst, _relerr(gamma_field(e + 1).value, -e.holo * e.anti * gamma_field(e).value))
    return worst, len(holo)


def check_gamma_reflection(rng, count: int = 10_000) -> tuple[float, int]:
    """``gamma_field(a) gamma_field(1 - a) = (-1)^k``."""
    holo, k = _random_regular_exponents(rng, count)
    value = gamma_field_array(holo, k) * gamma_field_array(1 - holo, -k)
    return float(np.max(np.abs(value - (-1.0) ** k))), len(holo)


def _random_trapezoid(rng, m: int, n: int) -> TrapezoidParams:
    def ex():
        return FieldExponent(complex(rng.uniform(0.05, 0.45), rng.uniform(-0.3, 0.3)), int(rng.integers(-2, 3)))

    rows = n - m + 1
    return TrapezoidParams(
        m,
        n,
        tuple(ex() for _ in range(rows)),
        tuple(ex() for _ in range(rows)),
        ex(),
        tuple(tuple(ex() for _ in range(j)) for j in range(m, n)),
    )


def check_trapezoid_reductions(rng, count: int = 100) -> tuple[float, int]:
    """``trapezoid_rhs(m = n) == dfa_rhs`` and the ladder relation at ``m = 1`` and general ``m``."""
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(1, 5))
        p = _random_trapezoid(rng, n, n)
        worst = max(worst, _relerr(trapezoid_rhs(p), dfa_rhs(DfaParams(n, p.sigma[0], p.tau[0], p.nu))))
        n = int(rng.integers(1, 5))
        q = _random_trapezoid(rng, 1, n)
        tri = TriangularParams(n, q.sigma, q.tau, q.theta)
        worst = max(worst, _relerr(trapezoid_rhs(q), main_rhs(tri)))
        m = int(rng.integers(1, n + 1))
        r = _random_trapezoid(rng, m, n)
        worst = max(worst, _relerr(main_rhs(trapezoid_ladder(r)), ladder_factor(r) * trapezoid_rhs(r)))
    return worst, count


def check_dfa_sine_form(rng, count: int = 100) -> tuple[float, int]:
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(1, 5))
        s, t = rng.uniform(0.05, 0.6, size=2)
        th = rng.uniform(0.02, 0.9 / (2 * n))
        closed = dfa_rhs(DfaParams(n, FieldExponent(s), FieldExponent(t), FieldExponent(th)))
        worst = max(worst, _relerr(closed, df_rhs_sin_form(s, t, th, n)))
    return worst, count


def check_anderson_jacobian(rng, trials: int = 50, sizes=(2, 3, 4)) -> tuple[float, int]:
    worst = 0.0
    for n in sizes:
        for _ in range(trials):
            u, z = _points(rng, n), _points(rng, n - 1)
            numeric = numeric_complex_jacobian(lambda v: anderson_forward(v, z).as_vector(), u)
            worst = max(worst, _relerr(numeric, anderson_jacobian_closed(u, z)))
    return worst, trials * len(sizes)


def check_dual_jacobian(rng, trials: int = 50, sizes=(2, 3)) -> tuple[float, int]:
    worst = 0.0
    for n in sizes:
        for _ in range(trials):
            z, u = _points(rng, n), _points(rng, n + 1)
            numeric = numeric_complex_jacobian(lambda v: dual_w_map(v, u)[:n], z)
            worst = max(worst, _relerr(numeric, dual_jacobian_closed(z, u)))
    return worst, trials * len(sizes)


def check_real_jacobian(rng, trials: int = 50) -> tuple[float, int]:
    """Real 2n x 2n Jacobian equals the squared modulus of the complex one."""
    worst = 0.0
    for n in (2, 3):
        for _ in range(trials):
            u, z = _points(rng, n), _points(rng, n - 1)
            f = lambda v: anderson_forward(v, z).as_vector()  # noqa: E731
            worst = max(worst, _relerr(numeric_real_jacobian(f, u), abs(anderson_jacobian_closed(u, z)) ** 2))
            zz, uu = _points(rng, n), _points(rng, n + 1)
            g = lambda v: dual_w_map(v, uu)[:n]  # noqa: E731
            worst = max(worst, _relerr(numeric_real_jacobian(g, zz), abs(dual_jacobian_closed(zz, uu)) ** 2))
    return worst, 4 * trials


def check_sum_res(rng, count: int = 1000) -> tuple[float, int]:
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(1, 6))
        u, z = _points(rng, n), _points(rng, n - 1)
        a = complex(*rng.normal(size=2))
        worst = max(worst, sum_res_identity_check(u, z, a))
    return worst, count


def check_w_sum(rng, count: int = 1000) -> tuple[float, int]:
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(1, 6))
        w = dual_w_map(_points(rng, n), _points(rng, n + 1))
        worst = max(worst, abs(w.sum() - 1))
    return worst, count


def check_cauchy(rng, trials: int = 20, max_size: int = 5) -> tuple[float, int]:
    worst = 0.0
    for size in range(1, max_size + 1):
        for _ in range(trials):
            z, u = _points(rng, size), _points(rng, size)
            worst = max(worst, _relerr(cauchy_det(z, u), cauchy_det_direct(z, u)))
    return worst, trials * max_size


def residual_checks() -> list[ResidualCheck]:
    return [
        ResidualCheck(1, "gamma_three_forms", 1e-10, check_gamma_three_forms),
        ResidualCheck(2, "gamma_recurrence", 1e-10, check_gamma_recurrence),
        ResidualCheck(2, "gamma_reflection", 1e-10, check_gamma_reflection),
        ResidualCheck(8, "trapezoid_reductions", 1e-10, check_trapezoid_reductions),
        ResidualCheck(9, "dfa_sine_form", 1e-9, check_dfa_sine_form),
        ResidualCheck(10, "anderson_jacobian", 1e-6, check_anderson_jacobian),
        ResidualCheck(10, "dual_jacobian", 1e-6, check_dual_jacobian),
        ResidualCheck(10, "real_jacobian_modulus", 1e-5, check_real_jacobian),
        ResidualCheck(11, "sum_res_identity", 1e-10, check_sum_res),
        ResidualCheck(11, "w_sum_one", 1e-10, check_w_sum),
        ResidualCheck(11, "cauchy_determinant", 1e-10, check_cauchy),
    ]


# ----------------------------------------------------------------- runner


def run_residual(check: ResidualCheck, seed: int, index: int) -> CheckResult:
    rng = np.random.default_rng(derive_seed(seed, 1, index))
    start = time.perf_counter()
    worst, count = check.run(rng)
    passed = bool(math.isfinite(worst) and worst < check.threshold)
    record = {"max_residual": worst, "threshold": check.threshold, "points": count}
    return CheckResult(check.criterion, check.name, "residual", passed, record, time.perf_counter() - start)


def run_mc(case: McCase, seed: int, index: int, samples: int | None = None, chunks: int = FULL_CHUNKS, workers: int = 1):
    n = samples or case.samples
    n -= n % chunks
    start = time.perf_counter()
    report = verify(case.spec, n, seed=derive_seed(seed, 2, index), chunks=chunks, workers=workers)
    record = {"gate": case.gate, "report": report.to_dict(include_timing=False)}
    return CheckResult(case.criterion, case.name, "mc", report.passed(case.gate), record, time.perf_counter() - start)


def run_battery(level: str, seed: int, workers: int = 1, on_result: Callable[[CheckResult], None] | None = None):
    """Run every residual check and Monte Carlo case; returns the results in battery order."""
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}; expected one of {sorted(LEVELS)}")
    samples = LEVELS[level]
    chunks = SMOKE_CHUNKS if level == "smoke" else FULL_CHUNKS
    results = []
    for i, check in enumerate(residual_checks()):
        results.append(run_residual(check, seed, i))
        if on_result:
            on_result(results[-1])
    for i, case in enumerate(mc_cases()):
        results.append(run_mc(case, seed, i, samples, chunks, workers))
        if on_result:
            on_result(results[-1])
    return results
