"""Model parameterization and the closed-form derived constants."""

import math

import gmpy2
import pytest

from harmonium import (
    DomainError,
    GaussianExponent,
    ModelParams,
    SingularModel,
    effective_oscillator,
    from_coupling,
    gaussian_exponent,
    mehler_parameters,
    params_from_exponents,
    rdo_exponent,
)
from harmonium.precision import context


def test_from_coupling_known_ratios():
    assert from_coupling(5, 15).l_plus == pytest.approx(0.5, rel=1e-15)
    assert from_coupling(3, 0).l_plus == 1.0
    assert from_coupling(5, 80).l_plus == pytest.approx(1.0 / 3.0, rel=1e-15)
    # the weakest tabulated coupling: N D/(m w^2) = 369/256 -> l+/l- = 4/5
    assert from_coupling(5, 369 / 256).l_plus == pytest.approx(0.8, rel=1e-15)


def test_from_coupling_domain():
    with pytest.raises(DomainError):
        from_coupling(5, -1.0)
    with pytest.raises(DomainError):
        from_coupling(0, 1.0)


def test_model_params_validation():
    with pytest.raises(DomainError):
        ModelParams(3, -1.0, 1.0)
    with pytest.raises(DomainError):
        ModelParams(3, 1.0, 0.0)
    p = ModelParams(4, 1.0, 0.5)
    assert p.coupling_ratio() == pytest.approx(15.0)
    assert p.l_ratio() == 0.5


def test_gaussian_exponent_values():
    # zero coupling: B vanishes
    g = gaussian_exponent(ModelParams(3, 1.0, 1.0))
    assert float(g.a_cap) == pytest.approx(0.5)
    assert float(g.b_cap) == 0.0
    # attractive, N = 3, l+ = 1/2: A = 2, B = (4-1)/(2*3) = 1/2
    g = gaussian_exponent(ModelParams(3, 1.0, 0.5))
    assert float(g.a_cap) == pytest.approx(2.0)
    assert float(g.b_cap) == pytest.approx(0.5)
    # repulsive, N = 2, l+ = 2: A = 1/8, B = (1/4-1)/4 = -3/16
    g = gaussian_exponent(ModelParams(2, 1.0, 2.0))
    assert float(g.a_cap) == pytest.approx(0.125)
    assert float(g.b_cap) == pytest.approx(-0.1875)


def test_gaussian_exponent_sign_pattern():
    for ratio in (0.3, 0.5, 0.9):
        assert float(gaussian_exponent(ModelParams(4, 1.0, ratio)).b_cap) > 0
    for ratio in (1.1, 2.0, 5.0):
        assert float(gaussian_exponent(ModelParams(4, 1.0, ratio)).b_cap) < 0


def test_gaussian_exponent_always_normalizable():
    # A - (N-1) B = (1/l+^2 + (N-1)/l-^2)/(2N) > 0 for every valid model
    for n in (1, 2, 3, 5, 9):
        for ratio in (0.05, 0.4, 1.0, 3.0, 20.0):
            g = gaussian_exponent(ModelParams(n, 1.0, ratio))
            assert float(g.a_cap) - (n - 1) * float(g.b_cap) > 0


def test_rdo_exponent_zero_coupling():
    r = rdo_exponent(GaussianExponent(0.5, 0.0, 3), 3)
    assert float(r.a_small) == pytest.approx(0.5)
    assert float(r.b_small) == 0.0
    assert float(r.c_norm) == pytest.approx(3 * math.sqrt(1 / math.pi))
    assert float(r.c_mix) == 0.0


def test_rdo_exponent_singular_rejected():
    # denominator A - (N-1) B <= 0 must be rejected (hand-built exponents only)
    with pytest.raises(SingularModel):
        GaussianExponent(2.0, 1.5, 3)
    with pytest.raises(SingularModel):
        rdo_exponent(GaussianExponent(2.0, 1.5, 2), 3)


def test_rdo_exponent_frozen_case():
    # independent re-evaluation: b = B^2/(A-B) = 225/272, a = (A-B) - b/2 = 353/544
    r = rdo_exponent(GaussianExponent(2.0, 0.9375, 2), 2)
    assert float(r.b_small) == pytest.approx(0.8272058823529411, rel=1e-15)
    assert float(r.a_small) == pytest.approx(0.6488970588235294, rel=1e-15)
    assert float(r.c_norm) == pytest.approx(0.7740617226446519, rel=1e-14)
    assert float(r.c_mix) == pytest.approx(float(r.b_small) / 2, rel=0, abs=0)


def test_rdo_exponent_positive_b_for_both_signs_of_coupling():
    for ratio in (0.5, 2.0):
        p = ModelParams(3, 1.0, ratio)
        r = rdo_exponent(gaussian_exponent(p), 3)
        assert float(r.b_small) > 0
        assert 2 * float(r.a_small) - abs(float(r.b_small)) > 0


def test_c_mix_is_half_b_exactly():
    for ratio in (0.3, 0.8, 1.7):
        r = rdo_exponent(gaussian_exponent(ModelParams(4, 1.0, ratio), 128), 4, 128)
        with context(130):
            assert r.c_mix * 2 == r.b_small


def test_effective_oscillator_paper_values():
    beta3 = effective_oscillator(ModelParams(3, 1.0, 0.8)).beta_homega
    assert float(beta3) == pytest.approx(4.51, rel=5e-3)
    beta5 = effective_oscillator(ModelParams(5, 1.0, 0.8)).beta_homega
    assert float(beta5) == pytest.approx(4.83, rel=5e-3)


def test_effective_oscillator_zero_coupling():
    osc = effective_oscillator(ModelParams(7, 1.0, 1.0))
    assert osc.beta_infinite
    assert osc.beta_homega is None
    assert float(osc.boltzmann_q) == 0.0
    assert float(osc.length) == pytest.approx(1.0)
    # N = 1 is effectively free regardless of the length ratio
    osc1 = effective_oscillator(ModelParams(1, 1.0, 0.5))
    assert osc1.beta_infinite
    assert float(osc1.length) == pytest.approx(1.0)


def test_effective_oscillator_z_eff():
    osc = effective_oscillator(ModelParams(3, 1.0, 0.8), 128)
    with context(128):
        expected = (gmpy2.mpfr(3) / 2) / gmpy2.sinh(osc.beta_homega / 2)
        assert float(abs(osc.z_eff - expected)) < 1e-30


def test_q_route_agreement():
    # Gibbs route q = exp(-arcsinh(1/(L^2 b))) vs Mehler route q = (d-c)/(d+c)
    for n in (2, 3, 5, 8):
        for ratio in (0.2, 0.5, 0.8, 0.95, 1.3, 2.5):
            osc = effective_oscillator(ModelParams(n, 1.0, ratio), 128)
            qm, lm = mehler_parameters(ModelParams(n, 1.0, ratio), 128)
            assert float(abs(qm - osc.boltzmann_q) / qm) < 1e-12
            assert float(abs(lm - osc.length) / lm) < 1e-12


def test_length_route_agreement():
    # L = (4a^2 - b^2)^(-1/4) equals the closed form in l-, l+
    for n in (2, 4):
        for ratio in (0.5, 1.6):
            p = ModelParams(n, 1.0, ratio)
            r = rdo_exponent(gaussian_exponent(p, 128), n, 128)
            osc = effective_oscillator(p, 128)
            with context(128):
                l_ab = (4 * r.a_small**2 - r.b_small**2) ** (gmpy2.mpfr(-1) / 4)
                assert float(abs(l_ab - osc.length) / osc.length) < 1e-30


def test_beta_monotone_in_coupling_distance():
    # beta decreases strictly as |l+/l- - 1| grows, on both sides
    attractive = [1 - 0.1 * i for i in range(1, 8)]
    betas = [float(effective_oscillator(ModelParams(4, 1.0, r)).beta_homega) for r in attractive]
    assert all(b1 > b2 for b1, b2 in zip(betas, betas[1:]))
    repulsive = [1 + 0.2 * i for i in range(1, 8)]
    betas = [float(effective_oscillator(ModelParams(4, 1.0, r)).beta_homega) for r in repulsive]
    assert all(b1 > b2 for b1, b2 in zip(betas, betas[1:]))


def test_params_from_exponents_round_trip():
    p = ModelParams(3, 1.0, 0.8)
    g = gaussian_exponent(p)
    back = params_from_exponents(3, float(g.a_cap), float(g.b_cap))
    assert back.l_minus == pytest.approx(1.0, rel=1e-14)
    assert back.l_plus == pytest.approx(0.8, rel=1e-14)
