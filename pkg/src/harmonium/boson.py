"""Closed-form bosonic kernel, its geometric spectrum, and the Mehler cross-check.

The bosonic one-particle kernel is an exact Gibbs state of one effective
oscillator, so its spectrum is generated analytically (lambda_k = N(1-q) q^k);
diagonalization appears only in tests as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2

from .errors import DomainError
from .model import ModelParams, effective_oscillator, gaussian_exponent, rdo_exponent
from .numerics import hermite_function
from .precision import context

BOSON_KMAX_DEFAULT = 200


@dataclass(frozen=True)
class BosonSpectrum:
    """Occupation numbers N(1-q) q^k, k = 0..k_max; orbitals are the Hermite
    functions with scale L_N and need no storage."""

    occupations: tuple
    q: object
    n_particles: int

    def partial_sum(self, k: int):
        acc = gmpy2.mpfr(0)
        for lam in self.occupations[: k + 1]:
            acc += lam
        return acc


def boson_kernel(p: ModelParams, x, y, precision_bits: int = 53):
    """Kernel value c_N exp(-a_N (x^2 + y^2) + b_N x y)."""
    g = gaussian_exponent(p, precision_bits)
    r = rdo_exponent(g, p.n_particles, precision_bits)
    with context(precision_bits):
        xx = gmpy2.mpfr(x)
        yy = gmpy2.mpfr(y)
        return r.c_norm * gmpy2.exp(
            -r.a_small * (xx * xx + yy * yy) + r.b_small * xx * yy
        )


def boson_spectrum(p: ModelParams, k_max: int = BOSON_KMAX_DEFAULT,
                   precision_bits: int = 53) -> BosonSpectrum:
    """Boltzmann-law occupations for k = 0..k_max."""
    if k_max < 1:
        raise DomainError(f"k_max must be >= 1, got {k_max}")
    osc = effective_oscillator(p, precision_bits)
    n = p.n_particles
    with context(precision_bits):
        q = osc.boltzmann_q
        occ = []
        qk = gmpy2.mpfr(1)
        for k in range(k_max + 1):
            occ.append(n * (1 - q) * qk)
            qk = qk * q
        return BosonSpectrum(tuple(occ), q, n)


def mehler_check(p: ModelParams, x, y, terms: int, precision_bits: int = 53):
    """Relative residual of the truncated orbital expansion of the kernel.

    Compares c_N exp(-a(x^2+y^2) + b x y) against
    N (1-q) sum_{k<terms} q^k phi_k(x) phi_k(y) with scale L_N; the prefactor
    is the one that makes the series converge to the kernel exactly as
    terms -> infinity.  Returns |kernel - partial sum| / |kernel|.
    """
    if terms < 1:
        raise DomainError(f"terms must be >= 1, got {terms}")
    osc = effective_oscillator(p, precision_bits)
    if not osc.boltzmann_q < 1:
        raise DomainError("Mehler expansion requires q < 1")
    kernel = boson_kernel(p, x, y, precision_bits)
    n = p.n_particles
    with context(precision_bits):
        q = osc.boltzmann_q
        scale = osc.length
        acc = gmpy2.mpfr(0)
        qk = gmpy2.mpfr(1)
        for k in range(terms):
            if qk == 0:
                break
            acc += qk * hermite_function(k, scale, x, precision_bits) * hermite_function(
                k, scale, y, precision_bits
            )
            qk = qk * q
        series = n * (1 - q) * acc
        return abs(kernel - series) / abs(kernel)
