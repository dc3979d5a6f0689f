import math

import numpy as np
import pytest
from scipy import integrate as sci_integrate

from complex_selberg.closed_form import BetaParams, DfaParams, TriangularParams, beta_rhs, dfa_rhs
from complex_selberg.errors import NonFiniteSample
from complex_selberg.exponents import FieldExponent
from complex_selberg.integrands import build_integrand, const
from complex_selberg.mc_engine import (
    Component,
    CoordinateProposal,
    Proposal,
    SamplerSpec,
    chunk_rng,
    default_proposal,
    integrate,
    mixture_density,
    sample_coordinate,
    verify,
)

F = FieldExponent.from_floor

SPECS = [
    SamplerSpec(),
    SamplerSpec(0.2, 0.3, 0.3, 0.7, 0.5, 1.5),
    SamplerSpec(0.6, 0.05, 0.2, 2.0, 0.2, 3.0),
]


def test_sampler_spec_validation():
    with pytest.raises(ValueError):
        SamplerSpec(0.5, 1, 0.5, 1, 0.0, 2)
    with pytest.raises(ValueError):
        SamplerSpec(0.2, 1, 0.2, 1, 0.2, 2)
    with pytest.raises(ValueError):
        SamplerSpec(s=1.0)
    with pytest.raises(ValueError):
        SamplerSpec(p0=0)
    assert SamplerSpec.from_dict({"w0": 0.5, "p0": 1, "w1": 0.25, "p1": 1, "winf": 0.25, "s": 2}).w0 == 0.5


def test_coordinate_proposal_needs_tail():
    with pytest.raises(ValueError):
        CoordinateProposal((Component(1.0, 0.5, const(0)),))


def test_tail_component_normalized_by_radial_quadrature():
    tail = CoordinateProposal((Component(1.0, 2.0),))
    q = lambda r: mixture_density(tail, r)
    assert np.allclose(q(np.array([0.0, 1.0])), [1 / math.pi, 1 / (4 * math.pi)])
    mass, _ = sci_integrate.quad(lambda r: 2 * math.pi * r * q(r), 0, np.inf, epsabs=1e-13, epsrel=1e-13)
    assert mass == pytest.approx(1.0, abs=1e-10)


def test_unit_shape_is_uniform_disk():
    spec = SamplerSpec(0.5, 1.0, 0.25, 1.0, 0.25, 2.0)
    z = np.array([0.3j, 1.5, -0.9, 3 + 3j])

    def hand(v):
        return (
            0.5 / math.pi * (abs(v) < 1)
            + 0.25 / math.pi * (abs(v - 1) < 1)
            + 0.25 / math.pi * (1 + abs(v) ** 2) ** -2
        )

    assert np.allclose(mixture_density(spec, z), [hand(v) for v in z], rtol=1e-12)


def test_sample_coordinate_returns_its_density():
    rng = np.random.default_rng(0)
    z, dens = sample_coordinate(SPECS[1], rng)
    assert isinstance(z, complex) and dens == pytest.approx(float(mixture_density(SPECS[1], z)))
    zs, ds = sample_coordinate(SPECS[1], rng, 1000)
    assert np.all(ds > 0) and np.allclose(ds, mixture_density(SPECS[1], zs))


@pytest.mark.parametrize("spec", SPECS)
def test_unbiased_on_gaussian_density(spec):
    # each mixture is a valid proposal: a normalized Gaussian integrates to 1
    est = integrate(lambda z: np.exp(-np.abs(z[:, 0]) ** 2) / math.pi, 1, spec, 200_000, seed=1, chunks=4)
    assert abs(est.mean.real - 1) < 5 * est.stderr_re


def test_mixture_density_integrates_to_one():
    est = integrate(lambda z: mixture_density(SPECS[1], z[:, 0]), 1, SamplerSpec(), 200_000, seed=1, chunks=4)
    assert abs(est.mean.real - 1) < 5 * est.stderr_re


def test_area_estimate():
    radius = 1.7
    est = integrate(lambda z: (np.abs(z[:, 0]) < radius).astype(float), 1, SPECS[1], 200_000, seed=2, chunks=2)
    assert abs(est.mean.real - math.pi * radius**2) < 3 * est.stderr_re


def test_density_as_integrand_is_exact():
    prop = Proposal.product(SPECS[2], 2)
    est = integrate(lambda z: np.exp(prop.log_density(z)), 2, prop, 10_000, seed=3)
    assert est.mean == pytest.approx(1.0, abs=1e-12)
    assert est.stderr_re < 1e-12


def test_default_proposal_densities_integrate_to_one():
    params = [
        DfaParams(2, "0.3", "0.3", "0.15"),
        TriangularParams(2, ("0.3", "0.25"), ("0.25", "0.3"), (("0.2",),)),
    ]
    for p in params:
        prop = default_proposal(p)
        est = integrate(lambda z: np.exp(prop.log_density(z)), prop.dim, SamplerSpec(), 400_000, seed=4, chunks=4)
        assert abs(est.mean.real - 1) < 5 * est.stderr_re


def test_chunk_streams_differ():
    a = chunk_rng(5, 0).random(4)
    b = chunk_rng(5, 1).random(4)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, chunk_rng(5, 0).random(4))


def test_determinism_across_workers():
    f = build_integrand(BetaParams("0.3", "0.3"))
    prop = default_proposal(BetaParams("0.3", "0.3"))
    one = integrate(f, 1, prop, 40_000, seed=9, chunks=4, workers=1)
    two = integrate(f, 1, prop, 40_000, seed=9, chunks=4, workers=2)
    again = integrate(f, 1, prop, 40_000, seed=9, chunks=4, workers=3)
    assert one == two == again
    assert integrate(f, 1, prop, 40_000, seed=10, chunks=4) != one


def test_sample_count_must_divide():
    with pytest.raises(ValueError):
        integrate(lambda z: z[:, 0], 1, SamplerSpec(), 1001, chunks=4)


def test_non_finite_weight_aborts():
    with pytest.raises(NonFiniteSample):
        integrate(lambda z: np.full(len(z), np.inf), 1, SamplerSpec(), 100)


def test_beta_estimate_and_stderr_scaling():
    p = BetaParams("0.3", "0.3")
    f, prop = build_integrand(p), default_proposal(p)
    small = integrate(f, 1, prop, 250_000, seed=10, chunks=2)
    large = integrate(f, 1, prop, 1_000_000, seed=11, chunks=2)
    assert small.stderr_re / large.stderr_re == pytest.approx(2.0, rel=0.2)
    assert abs(large.mean.real - beta_rhs(p).real) < 4 * large.stderr_re
    # real integrand: the imaginary part is zero to rounding
    assert abs(large.mean.imag) <= 3 * large.stderr_im + 1e-15


def test_imaginary_part_consistency_with_offsets():
    p = BetaParams(F(0.2, 1), F(0.3, -1))
    rhs = beta_rhs(p)
    assert abs(rhs.imag) < 1e-12 * abs(rhs)
    est = integrate(build_integrand(p), 1, default_proposal(p), 400_000, seed=12, chunks=2)
    assert abs(est.mean.imag) < 3 * est.stderr_im


def test_verify_dfa_n1():
    report = verify(DfaParams(1, "0.3", "0.4", "0.2"), 1_000_000, seed=13, chunks=4)
    assert report.domain_passed and report.z_abs < 3
    assert report.rhs == pytest.approx(math.pi * beta_rhs(BetaParams("0.3", "0.4")))


def test_odd_theta_offset_sign():
    # n(n-1)/2 = 1 at n = 2: the sign factor flips the value, the integral does not
    p = DfaParams(2, F(0.3, 1), F(0.3, -1), F(0.15, 1))
    est = integrate(build_integrand(p), 2, default_proposal(p), 1_000_000, seed=14, chunks=4)
    se = math.hypot(est.stderr_re, est.stderr_im)
    corrected, with_sign = dfa_rhs(p, sign_factor=False), dfa_rhs(p)
    assert abs(est.mean - corrected) < 4 * se
    assert abs(est.mean - with_sign) > 20 * se


def test_verify_out_of_domain_skips_mc():
    report = verify(DfaParams(2, "0.45", "0.45", "0.15"), 1000)
    assert not report.domain_passed and report.estimate is None
    record = report.to_dict(include_timing=False)
    assert record["domain"] == "failed" and record["mc"] is None and record["z"] is None
    assert any(not q["passed"] for q in record["domain_checks"])
    assert "wall_seconds" not in record and not report.passed()
