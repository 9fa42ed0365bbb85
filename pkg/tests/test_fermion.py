"""Fermionic polynomial table, matrix assembly, quadrature oracle, h bands."""

import math
from fractions import Fraction

import gmpy2
import numpy as np
import pytest

from harmonium import (
    DomainError,
    ModelParams,
    PrecisionError,
    SingularModel,
    build_fermion_polynomial,
    effective_oscillator,
    fermion_polynomial_from_exponents,
    fermion_rdo_matrix,
    gauss_hermite,
    h_coefficients,
    hermite_function,
    ladder_position_matrix,
    quadrature_rdo_block,
    quadrature_rdo_element,
)
from harmonium.fermion import FermionPolynomial
from harmonium.model import rdo_exponent_fractions
from harmonium.precision import context, to_mpfr


def three_particle_block(a: Fraction, b: Fraction):
    """Printed closed-form coefficients of the three-particle prefactor."""
    c1 = Fraction(1, 24) * (96 * a**4 * b**2 - 480 * a**3 * b**3 + 600 * a**2 * b**4)
    c2 = Fraction(1, 6) * (
        -96 * a**5 * b + 720 * a**4 * b**2 - 1824 * a**3 * b**3 + 1560 * a**2 * b**4
    )
    c3 = Fraction(1, 4) * (
        64 * a**6 - 640 * a**5 * b + 2464 * a**4 * b**2 - 4320 * a**3 * b**3
        + 2904 * a**2 * b**4
    )
    c4 = Fraction(1, 2) * (
        -8 * a**5 + 72 * a**4 * b - 264 * a**3 * b**2 + 460 * a**2 * b**3
        - 312 * a * b**4
    )
    c5 = 8 * a**5 - 48 * a**4 * b + 72 * a**3 * b**2 + 44 * a**2 * b**3 - 120 * a * b**4
    c6 = 3 * a**4 - 24 * a**3 * b + 75 * a**2 * b**2 - 108 * a * b**3 + 60 * b**4
    d3 = math.sqrt(float(a * a - 3 * a * b)) / (
        math.sqrt(2 * math.pi) * float(a - 2 * b) ** 4.5
    )
    return [float(c) * d3 for c in (c1, c2, c3, c4, c5, c6)]


@pytest.mark.parametrize(
    "a,b", [(Fraction(1), Fraction(0)), (Fraction(1), Fraction(1, 10)), (Fraction(2), Fraction(1, 4))]
)
def test_three_particle_golden_coefficients(a, b):
    fp = fermion_polynomial_from_exponents(3, a, b, 128)
    ref = three_particle_block(a, b)
    built = [
        float(fp.coeff(2, 0)),
        float(fp.coeff(2, 1)),
        float(fp.coeff(2, 2)),
        float(fp.coeff(1, 0)),
        float(fp.coeff(1, 1)),
        float(fp.coeff(0, 0)),
    ]
    for got, want in zip(built, ref):
        if want == 0:
            assert got == 0
        else:
            assert got == pytest.approx(want, rel=1e-10)


def test_single_particle_polynomial_is_projector_weight():
    # N = 1: constant prefactor sqrt(s/pi); the kernel is a rank-one projector
    p = ModelParams(1, 1.0, 0.5)
    fp = build_fermion_polynomial(p, 128)
    assert len(fp.coeffs) == 1
    _, _, s = rdo_exponent_fractions(p)
    assert float(fp.coeff(0, 0)) == pytest.approx(math.sqrt(float(s) / math.pi), rel=1e-25)


@pytest.mark.parametrize("n,ratio", [(2, 0.8), (3, 0.5), (4, 0.7), (3, 1.25)])
def test_polynomial_symmetry_exact(n, ratio):
    fp = build_fermion_polynomial(ModelParams(n, 1.0, ratio), 128)
    for nu in range(n):
        for mu in range(2 * nu + 1):
            assert fp.coeff(nu, mu) == fp.coeff(nu, 2 * nu - mu)


@pytest.mark.parametrize("n,ratio", [(2, 0.8), (3, 0.5), (4, 1.25)])
def test_polynomial_trace_normalization(n, ratio):
    # quadrature of F(x,x) e^(-(2a-b) x^2) must equal N
    p = ModelParams(n, 1.0, ratio)
    fp = build_fermion_polynomial(p, 128)
    _, _, s = rdo_exponent_fractions(p)
    rule = gauss_hermite(80, 128)
    with context(128):
        rt = gmpy2.sqrt(to_mpfr(s, 128))
        acc = gmpy2.mpfr(0)
        for u, w in zip(rule.nodes, rule.weights):
            x = u / rt
            acc += w * fp.value(x, x)
        assert float(acc / rt) == pytest.approx(n, rel=1e-12)


def test_polynomial_singular_exponents_rejected():
    with pytest.raises(SingularModel):
        fermion_polynomial_from_exponents(3, 2.0, 1.5, 128)


def test_polynomial_json_round_trip():
    fp = build_fermion_polynomial(ModelParams(3, 1.0, 0.8), 128)
    data = fp.to_json_dict()
    back = FermionPolynomial.from_json_dict(data)
    assert back.n_particles == 3
    for nu in range(3):
        for mu in range(2 * nu + 1):
            assert back.coeff(nu, mu) == fp.coeff(nu, mu)


def test_ladder_matrix_values():
    x = ladder_position_matrix(2, 1.0)
    assert float(x.entry(0, 0)) == 0.0
    assert float(x.entry(0, 1)) == pytest.approx(1 / math.sqrt(2), rel=1e-15)
    with pytest.raises(DomainError):
        ladder_position_matrix(1, 1.0)


def test_ladder_matrix_squared_diagonal():
    scale = 0.75
    x = ladder_position_matrix(30, scale).to_float_array()
    x2 = x @ x
    for m in range(28):  # interior entries, free of the truncation edge
        assert x2[m, m] == pytest.approx(scale**2 * (m + 0.5), rel=1e-14)


def test_ladder_matrix_against_quadrature():
    # <m|X|n> equals the integral of phi_m(x) x phi_n(x)
    scale = 0.9
    x = ladder_position_matrix(21, scale, 64)
    rule = gauss_hermite(60, 64)
    with context(64):
        s = gmpy2.mpfr(scale)
        vals = [
            [hermite_function(m, s, u * s, 64) * gmpy2.exp(u * u / 2) for u in rule.nodes]
            for m in range(21)
        ]
        # x = s u substitution: dx = s du, weight e^(-u^2) matches the pair of
        # Gaussians in phi_m phi_n exactly
        for m in range(0, 21, 4):
            for n in range(m, 21, 3):
                acc = gmpy2.mpfr(0)
                for i, (u, w) in enumerate(zip(rule.nodes, rule.weights)):
                    acc += w * vals[m][i] * vals[n][i] * (u * s)
                acc *= s
                assert float(acc) == pytest.approx(float(x.entry(m, n)), abs=1e-12)


def test_matrix_zero_coupling_projector():
    mat = fermion_rdo_matrix(ModelParams(3, 1.0, 1.0), 10, 53)
    arr = mat.to_float_array()
    expect = np.zeros((10, 10))
    expect[0, 0] = expect[1, 1] = expect[2, 2] = 1.0
    assert np.abs(arr - expect).max() < 1e-14


def test_matrix_band_and_parity_zeros_exact():
    mat = fermion_rdo_matrix(ModelParams(3, 1.0, 0.5), 40, 53)
    # odd |m-n|: exactly zero
    assert float(mat.entry(0, 1)) == 0.0
    assert float(mat.entry(3, 8)) == 0.0
    # beyond the polynomial bandwidth 2(N-1) = 4: exactly zero
    assert float(mat.entry(0, 6)) == 0.0
    assert float(mat.entry(5, 11)) == 0.0
    # inside the band: nonzero
    assert float(mat.entry(0, 4)) != 0.0


@pytest.mark.parametrize("n,ratio,bits", [(2, 0.8, 53), (3, 0.5, 53), (3, 0.8, 128)])
def test_matrix_trace(n, ratio, bits):
    mat = fermion_rdo_matrix(ModelParams(n, 1.0, ratio), 10 * n + 5, bits)
    assert float(mat.trace()) == pytest.approx(n, rel=1e-12)


def test_matrix_preconditions():
    with pytest.raises(DomainError):
        fermion_rdo_matrix(ModelParams(3, 1.0, 0.8), 2, 53)
    with pytest.raises(DomainError):
        fermion_rdo_matrix(ModelParams(3, 1.0, 0.8), 20, 40)
    with pytest.raises(PrecisionError):
        fermion_rdo_matrix(ModelParams(3, 1.0, 1.0 + 1e-5), 20, 53)


def test_matrix_oracle_equivalence_quick():
    p = ModelParams(2, 1.0, 0.8)
    mat = fermion_rdo_matrix(p, 13, 53)
    block = quadrature_rdo_block(p, 12, 2 * (24 + 2) + 8, 53)
    worst = 0.0
    for m in range(13):
        for n in range(13):
            worst = max(worst, abs(float(mat.entry(m, n)) - float(block[m, n])))
    assert worst < 1e-8


def test_quadrature_element_parity_and_pure_state():
    p = ModelParams(3, 1.0, 0.8)
    assert abs(float(quadrature_rdo_element(p, 0, 1, 60))) < 1e-14
    assert abs(float(quadrature_rdo_element(p, 2, 5, 60))) < 1e-14
    p1 = ModelParams(1, 1.0, 0.7)
    assert float(quadrature_rdo_element(p1, 0, 0, 40)) == pytest.approx(1.0, rel=1e-12)


def test_quadrature_element_self_convergence():
    p = ModelParams(3, 1.0, 0.8)
    v1 = float(quadrature_rdo_element(p, 1, 1, 16))
    v2 = float(quadrature_rdo_element(p, 1, 1, 32))
    assert abs(v1 - v2) < 1e-10
    with pytest.raises(DomainError):
        quadrature_rdo_element(p, 10, 10, 12)


def test_h_single_particle_trivial():
    p = ModelParams(1, 1.0, 0.5)
    h = h_coefficients(p)
    fp = build_fermion_polynomial(p, 53)
    assert h.h(0) == fp.coeff(0, 0)
    with pytest.raises(DomainError):
        h.h(1)


def test_h_reality_and_pairing():
    p = ModelParams(3, 1.0, 0.5)
    h = h_coefficients(p, 128)
    q = effective_oscillator(p, 128).boltzmann_q
    with context(128):
        for r in (-2, -1, 0, 1, 2):
            assert gmpy2.is_finite(h.h(r))
        # hermiticity of the asymptotic band: h_(-r) = q^(2r) h_r exactly
        for r in (1, 2):
            assert float(abs(h.h(-r) / (h.h(r) * q ** (2 * r)) - 1)) < 1e-30


def test_h_zero_coupling_rejected():
    with pytest.raises(DomainError):
        h_coefficients(ModelParams(3, 1.0, 1.0))


@pytest.mark.slow
def test_h_matrix_element_limit():
    # <m - 2r| rho |m> / (m^(N-1) e^(-beta(m+1/2))) approaches h_r (up to one
    # global factor): the r-profile matches and drifts < 5% from m=200 to 400
    p = ModelParams(3, 1.0, 0.8)
    bits = 512
    mat = fermion_rdo_matrix(p, 408, bits)
    h = h_coefficients(p, bits)
    q = effective_oscillator(p, bits).boltzmann_q
    with context(bits):
        ratios = {}
        for m in (200, 400):
            pref = gmpy2.mpfr(m) ** 2 * q ** (m + gmpy2.mpfr(1) / 2)
            v0 = mat.entry(m, m) / pref
            for r in (-2, -1, 1, 2):
                val = (mat.entry(m - 2 * r, m) / pref) / v0
                ratios[(m, r)] = val / (h.h(r) / h.h(0))
        for r in (-2, -1, 1, 2):
            drift = abs(float(ratios[(400, r)] / ratios[(200, r)]) - 1)
            assert drift < 0.05
            # and the profile itself is already near 1 at m = 400
            assert abs(float(ratios[(400, r)]) - 1) < 0.08
