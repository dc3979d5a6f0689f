import cmath
import math
from itertools import permutations

import numpy as np
import pytest

from complex_selberg.closed_form import (
    BetaParams,
    DfaParams,
    DirichletParams,
    DualParams,
    LemmaParams,
    TrapezoidParams,
    TriangularParams,
)
from complex_selberg.errors import ParameterShapeError, SingularPoint
from complex_selberg.exponents import FieldExponent
from complex_selberg.integrands import (
    TrapezoidConfig,
    TriangularConfig,
    beta_integrand,
    build_integrand,
    dfa_integrand,
    dirichlet_integrand,
    dual_integrand,
    lemma_integrand,
    main_integrand,
    trapezoid_index,
    trapezoid_integrand,
    triangular_index,
)

F = FieldExponent.from_floor


def pw(z, holo, k=0):
    """z^(a|a') by the polar definition |z|^(a+a') e^{ik arg z}, independent of the package."""
    anti = holo - k
    return cmath.exp((holo + anti) * math.log(abs(z))) * cmath.exp(1j * k * cmath.phase(z))


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def random_exponent(rng):
    return FieldExponent(complex(rng.uniform(-0.6, 0.6), rng.uniform(-0.3, 0.3)), int(rng.integers(-2, 3)))


def h(e):
    return e.holo, e.offset


# --------------------------------------------------------- basic examples


def test_beta_integrand_value():
    p = BetaParams("0.3", "0.4")
    z = 0.2 + 0.7j
    assert rel(beta_integrand(p, z), pw(z, -0.7) * pw(1 - z, -0.6) / math.pi) < 1e-13


def test_dfa_trivial_exponents_give_one():
    p = DfaParams(1, "1", "1", "0.2")
    assert dfa_integrand(p, [0.3 + 2j]) == pytest.approx(1.0)


def test_dfa_coincident_points_are_a_zero():
    p = DfaParams(2, "0.3", "0.3", "0.15")
    assert dfa_integrand(p, [0.2 + 0.1j, 0.2 + 0.1j], path="direct") == 0
    assert dfa_integrand(p, [0.2 + 0.1j, 0.2 + 0.1j], path="log") == 0


def test_dfa_two_paths_and_hand_value():
    p = DfaParams(2, "0.3", "0.3", "0.15")
    z = [0.5, 0.25 + 0.25j]
    direct = dfa_integrand(p, z, path="direct")
    log = dfa_integrand(p, z, path="log")
    assert rel(direct, log) < 1e-12
    z1, z2 = z
    hand = pw(z1, -0.7) * pw(1 - z1, -0.7) * pw(z2, -0.7) * pw(1 - z2, -0.7) * pw(z1 - z2, 0.3)
    assert rel(direct, hand) < 1e-12


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_dfa_singular_point():
    p = DfaParams(2, "0.3", "0.3", "0.15")
    with pytest.raises(SingularPoint):
        dfa_integrand(p, [0.0, 0.5j], path="direct")
    with pytest.raises(SingularPoint):
        dfa_integrand(p, [0.0, 0.5j], path="log")


def test_dfa_exactly_symmetric():
    rng = np.random.default_rng(4)
    for _ in range(20):
        p = DfaParams(3, random_exponent(rng), random_exponent(rng), random_exponent(rng))
        z = rng.normal(size=3) + 1j * rng.normal(size=3)
        ref = dfa_integrand(p, z)
        for perm in permutations(range(3)):
            assert rel(dfa_integrand(p, z[list(perm)]), ref) < 1e-12


def test_dfa_tail_bounded_on_rays():
    # along a ray in one coordinate |integrand| ~ |z|^(2(sigma-1) + 2(tau-1) + 4 theta) = |z|^-2.2,
    # so the weight (1 + |z|^2)^1.1 flattens it
    p = DfaParams(2, "0.3", "0.3", "0.15")
    direction = cmath.exp(0.7j)
    vals = [abs(dfa_integrand(p, [0.3 + 0.1j, r * direction])) * (1 + r * r) ** 1.1 for r in np.geomspace(10, 1e6, 12)]
    assert max(vals) / min(vals) < 2


# ------------------------------------------------------- hand-coded n = 2


def test_main_n2_against_term_by_term_expression():
    rng = np.random.default_rng(6)
    for _ in range(25):
        s1, s2, t1, t2, th = (random_exponent(rng) for _ in range(5))
        p = TriangularParams(2, (s1, s2), (t1, t2), ((th,),))
        z11 = complex(*rng.normal(size=2))
        z21, z22 = rng.normal(size=2) + 1j * rng.normal(size=2)
        cfg = TriangularConfig(((z11,), (z21, z22)))
        a, b, c = s1 - s2 - th, t1 - t2 - th, th - FieldExponent(1.0)
        hand = (
            pw(z11, *h(a))
            * pw(1 - z11, *h(b))
            * pw(z21, *h(s2 - FieldExponent(1.0)))
            * pw(1 - z21, *h(t2 - FieldExponent(1.0)))
            * pw(z22, *h(s2 - FieldExponent(1.0)))
            * pw(1 - z22, *h(t2 - FieldExponent(1.0)))
            * pw(z11 - z21, *h(c))
            * pw(z11 - z22, *h(c))
            * pw(z21 - z22, 1.0)
        )
        assert rel(main_integrand(p, cfg), hand) < 1e-11
        assert rel(main_integrand(p, cfg, path="log"), main_integrand(p, cfg, path="direct")) < 1e-12


def test_main_n1_is_beta():
    p = TriangularParams(1, ("0.3",), ("0.4",), ())
    z = 0.1 - 0.8j
    assert rel(main_integrand(p, TriangularConfig(((z,),))), math.pi * beta_integrand(BetaParams("0.3", "0.4"), z)) < 1e-13


def test_main_denominator_coincidence():
    # the denominator block contributes (z_21 - z_22)^(2 - theta_21 - theta_22): a zero below theta = 1,
    # a non-removable singularity above
    cfg = TriangularConfig(((0.3,), (0.1 + 0.2j, 0.1 + 0.2j), (0.5j, 2.0, -1.0)))
    small = TriangularParams(3, ("0.3", "0.25", "0.2"), ("0.3", "0.25", "0.2"), (("0.2",), ("0.15", "0.15")))
    assert main_integrand(small, cfg, path="direct") == 0
    large = TriangularParams(3, ("0.3", "0.25", "0.2"), ("0.3", "0.25", "0.2"), (("0.2",), ("1.2", "1.2")))
    with pytest.raises(SingularPoint):
        main_integrand(large, cfg, path="direct")


def test_config_shapes():
    with pytest.raises(ParameterShapeError):
        TriangularConfig(((0.1,), (0.2,)))
    with pytest.raises(ParameterShapeError):
        TrapezoidConfig(2, ((0.1,),))
    assert [triangular_index(j, a) for j in (1, 2, 3) for a in range(1, j + 1)] == list(range(6))
    assert [trapezoid_index(2, j, a) for j in (2, 3) for a in range(1, j + 1)] == list(range(5))


def test_dirichlet_n2_against_hand_expression():
    rng = np.random.default_rng(8)
    for _ in range(25):
        a = [random_exponent(rng) for _ in range(3)]
        t = rng.normal(size=2) + 1j * rng.normal(size=2)
        one = FieldExponent(1.0)
        hand = pw(t[0], *h(a[0] - one)) * pw(t[1], *h(a[1] - one)) * pw(1 - t[0] - t[1], *h(a[2] - one))
        assert rel(dirichlet_integrand(DirichletParams(tuple(a)), t), hand) < 1e-11


def test_dirichlet_simplex_face():
    t = [0.3 + 0.2j, 0.7 - 0.2j]
    assert dirichlet_integrand(DirichletParams(("0.3", "0.3", F(1.2))), t) == 0
    with pytest.raises(SingularPoint):
        dirichlet_integrand(DirichletParams(("0.3", "0.3", "0.4")), t)


def test_dirichlet_n1_is_beta():
    z = 0.4 + 0.4j
    assert rel(dirichlet_integrand(DirichletParams(("0.3", "0.5")), [z]), math.pi * beta_integrand(BetaParams("0.3", "0.5"), z)) < 1e-13


def test_lemma_n2_against_hand_expression():
    rng = np.random.default_rng(9)
    for _ in range(25):
        s, t, th = (random_exponent(rng) for _ in range(3))
        z1 = complex(*rng.normal(size=2))
        u = rng.normal(size=2) + 1j * rng.normal(size=2)
        one = FieldExponent(1.0)
        hand = pw(u[0] - u[1], 1.0)
        for up in u:
            hand *= pw(up, *h(s - one)) * pw(1 - up, *h(t - one)) * pw(up - z1, *h(th - one))
        assert rel(lemma_integrand(LemmaParams(s, t, (th,), (z1,)), u), hand) < 1e-11


def test_dual_n2_against_hand_expression():
    rng = np.random.default_rng(10)
    for _ in range(25):
        th = random_exponent(rng)
        u = rng.normal(size=3) + 1j * rng.normal(size=3)
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        one = FieldExponent(1.0)
        hand = pw(z[1] - z[0], 1.0)
        for za in z:
            for up in u:
                hand *= pw(za - up, *h(th - one))
        assert rel(dual_integrand(DualParams(th, tuple(u)), z), hand) < 1e-11


def test_dual_zero_locus():
    p = DualParams(F(1.3), (0, 1))
    assert dual_integrand(p, [1.0]) == 0


# -------------------------------------------------------------- trapezoid


def test_trapezoid_m_equals_n_matches_dfa_with_sign():
    rng = np.random.default_rng(12)
    for _ in range(30):
        n = int(rng.integers(2, 5))
        s, t, nu = (random_exponent(rng) for _ in range(3))
        z = rng.normal(size=n) + 1j * rng.normal(size=n)
        trap = trapezoid_integrand(TrapezoidParams(n, n, (s,), (t,), nu, ()), TrapezoidConfig(n, (tuple(z),)))
        dfa = dfa_integrand(DfaParams(n, s, t, nu), z)
        sign = (-1) ** (nu.offset * n * (n - 1) // 2)
        assert rel(trap, sign * dfa) < 1e-12


def test_trapezoid_row_m_coincidence():
    # at m = n the nu block merges with (z_1 - z_2)^1 into exponent 2 nu, so the sign of floor(nu) decides
    cfg = TrapezoidConfig(2, ((0.2 + 0.1j, 0.2 + 0.1j),))
    assert trapezoid_integrand(TrapezoidParams(2, 2, ("0.3",), ("0.3",), F(0.3), ()), cfg) == 0
    with pytest.raises(SingularPoint):
        trapezoid_integrand(TrapezoidParams(2, 2, ("0.3",), ("0.3",), F(-0.1), ()), cfg, path="direct")


def test_trapezoid_m1_n1_is_beta():
    z = -0.3 + 0.5j
    value = trapezoid_integrand(TrapezoidParams(1, 1, ("0.3",), ("0.4",), "0.2", ()), TrapezoidConfig(1, ((z,),)))
    assert rel(value, math.pi * beta_integrand(BetaParams("0.3", "0.4"), z)) < 1e-13


# ------------------------------------------------------- evaluator paths


def test_log_path_matches_direct_on_all_integrands():
    rng = np.random.default_rng(13)
    params = [
        DfaParams(4, F(0.2, 1), "0.3", F(0.1, -1)),
        TriangularParams(3, ("0.3", "0.25", "0.2"), ("0.25", "0.3", "0.2"), (("0.2",), ("0.15", "0.15"))),
        TrapezoidParams(2, 3, ("0.3", "0.25"), ("0.25", "0.3"), "0.15", (("0.2", "0.2"),)),
        DirichletParams(("0.2", "0.15", "0.2", "0.1")),
        LemmaParams("0.2", "0.25", ("0.15", "0.2"), (0.4 + 0.3j, -0.5 + 0.8j)),
        DualParams("0.2", (0, 1, 0.3 + 0.9j)),
    ]
    for p in params:
        f = build_integrand(p)
        z = rng.normal(size=(200, f.dim)) + 1j * rng.normal(size=(200, f.dim))
        d, lg = f.value_direct(z), f.value_log_path(z)
        assert np.max(np.abs(d - lg) / np.abs(d)) < 1e-12


def test_log_path_survives_overflow():
    p = DfaParams(12, "0.3", "0.3", "0.15")
    z = 1e6 * np.exp(1j * np.arange(12))
    f = build_integrand(p)
    assert np.isfinite(f.log_value(z).real)


def test_wrong_dimension_rejected():
    with pytest.raises(ParameterShapeError):
        dfa_integrand(DfaParams(2, "0.3", "0.3", "0.15"), [0.1, 0.2, 0.3])


def test_unknown_params_type():
    with pytest.raises(TypeError):
        build_integrand(object())
