"""Model parameterization and the closed-form constants of both kernels.

The model is fully specified by the particle number N and two oscillator
lengths: l_minus for the center-of-mass mode and l_plus shared by the N-1
relative modes.  All derived constants below are functions of (N, l-, l+)
only; the raw trap and coupling constants enter through the ratio
N D / (m w^2) = (l-/l+)^4 - 1 and are never stored separately.

A note on the ground-state exponent: writing the ground state as
N exp(-A x^2 + B_N (x_1+...+x_N)^2) and using y_1 = (x_1+...+x_N)/sqrt(N)
forces B_N = (1/l+^2 - 1/l-^2)/(2N).  The 1/N factor matters: without it the
reduced kernel stops being normalizable already at moderate attraction
(e.g. N = 3, l+/l- = 1/2), while with it the derived oscillator constants
reproduce the closed-form expressions in l-, l+ for every admissible model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from .errors import DomainError, SingularModel
from .precision import context, exact_fraction


@dataclass(frozen=True)
class ModelParams:
    """Particle number and the two oscillator length scales (units of l-)."""

    n_particles: int
    l_minus: float = 1.0
    l_plus: float = 1.0

    def __post_init__(self):
        if not isinstance(self.n_particles, int) or self.n_particles < 1:
            raise DomainError(f"n_particles must be a positive integer, got {self.n_particles}")
        if not (self.l_minus > 0 and math.isfinite(self.l_minus)):
            raise DomainError(f"l_minus must be positive and finite, got {self.l_minus}")
        if not (self.l_plus > 0 and math.isfinite(self.l_plus)):
            raise DomainError(f"l_plus must be positive and finite, got {self.l_plus}")

    def l_ratio(self) -> float:
        """The dimensionless interaction strength l+/l-."""
        return self.l_plus / self.l_minus

    def coupling_ratio(self) -> float:
        """N D / (m w^2) = (l-/l+)^4 - 1; > -1 for every valid model."""
        return (self.l_minus / self.l_plus) ** 4 - 1.0

    def is_zero_coupling(self) -> bool:
        return self.l_minus == self.l_plus


def from_coupling(n: int, coupling_ratio: float) -> ModelParams:
    """Model with l- = 1 and l+ fixed by the coupling ratio N D/(m w^2).

    Bound states require coupling_ratio > -1 (repulsion weaker than the trap).
    """
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if not coupling_ratio > -1:
        raise DomainError(
            f"coupling_ratio must exceed -1 for bound states, got {coupling_ratio}"
        )
    return ModelParams(n, 1.0, (1.0 + coupling_ratio) ** -0.25)


@dataclass(frozen=True)
class GaussianExponent:
    """Ground-state exponent parameters: exp(-A x^2 + B_N (sum x)^2)."""

    a_cap: object
    b_cap: object
    n_particles: int

    def __post_init__(self):
        if not self.a_cap > 0:
            raise SingularModel(f"A must be positive, got {self.a_cap}")
        if not self.a_cap - (self.n_particles - 1) * self.b_cap > 0:
            raise SingularModel(
                "A - (N-1) B_N must be positive for a normalizable ground state"
            )


@dataclass(frozen=True)
class RdoExponent:
    """Reduced-kernel exponent c_N exp(-a_N (x^2+y^2) + b_N x y) and C_N = b_N/2."""

    a_small: object
    b_small: object
    c_norm: object
    c_mix: object


@dataclass(frozen=True)
class EffectiveOscillator:
    """Gibbs-state parameters of the bosonic kernel.

    Only the products beta*hbar*Omega and the length L_N are determined by the
    model; mass and frequency are never separated.  Zero coupling is flagged
    explicitly (beta_infinite, q = 0) instead of storing a floating infinity.
    """

    length: object
    beta_homega: object  # None when beta_infinite
    boltzmann_q: object
    z_eff: object
    beta_infinite: bool
    n_particles: int


def gaussian_exponent(p: ModelParams, precision_bits: int = 53) -> GaussianExponent:
    """Exponent parameters A = 1/(2 l+^2), B_N = (1/l+^2 - 1/l-^2)/(2N)."""
    with context(precision_bits):
        lp = gmpy2.mpfr(p.l_plus)
        lm = gmpy2.mpfr(p.l_minus)
        a = 1 / (2 * lp * lp)
        b = (1 / (lp * lp) - 1 / (lm * lm)) / (2 * p.n_particles)
        return GaussianExponent(a, b, p.n_particles)


def gaussian_exponent_fractions(p: ModelParams) -> tuple[Fraction, Fraction]:
    """(A, B_N) as exact rationals of the stored binary lengths."""
    lp2 = exact_fraction(p.l_plus) ** 2
    lm2 = exact_fraction(p.l_minus) ** 2
    a = 1 / (2 * lp2)
    b = (1 / lp2 - 1 / lm2) / (2 * p.n_particles)
    return a, b


def rdo_exponent(g: GaussianExponent, n: int | None = None, precision_bits: int = 53) -> RdoExponent:
    """Kernel exponent parameters from the ground-state ones.

        b = (N-1) B^2 / (A - (N-1) B),   a = (A - B) - b/2,
        c = N sqrt((2a - b)/pi),         C = b/2.

    Raises SingularModel when A - (N-1)B <= 0 or the kernel is not trace
    class (2a - b <= 0); neither can occur for exponents derived from a valid
    ModelParams, only for hand-built (A, B) pairs.
    """
    if n is None:
        n = g.n_particles
    with context(precision_bits):
        a_cap = gmpy2.mpfr(g.a_cap)
        b_cap = gmpy2.mpfr(g.b_cap)
        denom = a_cap - (n - 1) * b_cap
        if not denom > 0:
            raise SingularModel(
                f"A - (N-1) B_N = {float(denom)} is not positive; kernel undefined"
            )
        b = (n - 1) * b_cap * b_cap / denom
        a = (a_cap - b_cap) - b / 2
        s = 2 * a - b
        if not s > 0:
            raise SingularModel(
                f"2 a_N - b_N = {float(s)} is not positive; kernel is not trace class"
            )
        c = n * gmpy2.sqrt(s / gmpy2.const_pi())
        return RdoExponent(a, b, c, b / 2)


def rdo_exponent_fractions(p: ModelParams) -> tuple[Fraction, Fraction, Fraction]:
    """(a_N, b_N, 2a_N - b_N) as exact rationals; raises like rdo_exponent."""
    a_cap, b_cap = gaussian_exponent_fractions(p)
    n = p.n_particles
    denom = a_cap - (n - 1) * b_cap
    if denom <= 0:
        raise SingularModel("A - (N-1) B_N is not positive; kernel undefined")
    b = (n - 1) * b_cap * b_cap / denom
    a = (a_cap - b_cap) - b / 2
    s = 2 * a - b
    if s <= 0:
        raise SingularModel("2 a_N - b_N is not positive; kernel is not trace class")
    return a, b, s


def effective_oscillator(p: ModelParams, precision_bits: int = 53) -> EffectiveOscillator:
    """Length L_N and dimensionless inverse temperature of the Gibbs form.

        L_N = sqrt(l- l+) [((N-1) l+^2 + l-^2)/(l+^2 + (N-1) l-^2)]^(1/4)
        beta hbar Omega = arcsinh( 2 l+ l- sqrt([(N-1)l+^2 + l-^2][l+^2 + (N-1)l-^2])
                                   / ((1 - 1/N) (l+^2 - l-^2)^2) )

    For l- = l+ (or N = 1) the effective temperature vanishes: q = 0 and the
    inverse temperature is flagged infinite.
    """
    n = p.n_particles
    with context(precision_bits):
        lm = gmpy2.mpfr(p.l_minus)
        lp = gmpy2.mpfr(p.l_plus)
        lm2 = lm * lm
        lp2 = lp * lp
        u = (n - 1) * lp2 + lm2
        w = lp2 + (n - 1) * lm2
        length = gmpy2.sqrt(lm * lp) * (u / w) ** (gmpy2.mpfr(1) / 4)
        if n == 1 or p.l_minus == p.l_plus:
            return EffectiveOscillator(
                length=length if n > 1 else lm,
                beta_homega=None,
                boltzmann_q=gmpy2.mpfr(0),
                z_eff=gmpy2.mpfr(0),
                beta_infinite=True,
                n_particles=n,
            )
        arg = 2 * lp * lm * gmpy2.sqrt(u * w) / ((1 - gmpy2.mpfr(1) / n) * (lp2 - lm2) ** 2)
        beta = gmpy2.asinh(arg)
        q = gmpy2.exp(-beta)
        z_eff = (gmpy2.mpfr(n) / 2) / gmpy2.sinh(beta / 2)
        return EffectiveOscillator(
            length=length,
            beta_homega=beta,
            boltzmann_q=q,
            z_eff=z_eff,
            beta_infinite=False,
            n_particles=n,
        )


def mehler_parameters(p: ModelParams, precision_bits: int = 53):
    """(q, L) by the kernel-diagonalization route: c^2 = 2a-b, d^2 = 2a+b,
    q = (d-c)/(d+c), L = (cd)^(-1/2).  Cross-check for effective_oscillator."""
    g = gaussian_exponent(p, precision_bits)
    r = rdo_exponent(g, p.n_particles, precision_bits)
    with context(precision_bits):
        c = gmpy2.sqrt(2 * r.a_small - r.b_small)
        d = gmpy2.sqrt(2 * r.a_small + r.b_small)
        q = (d - c) / (d + c)
        length = 1 / gmpy2.sqrt(c * d)
        return q, length


def params_from_exponents(n: int, a_cap, b_cap) -> ModelParams:
    """Invert (A, B_N) back to length scales: l+ = (2A)^(-1/2), l- = (2A - 2N B)^(-1/2)."""
    if not a_cap > 0:
        raise DomainError(f"A must be positive, got {a_cap}")
    inv_lm2 = 2 * a_cap - 2 * n * b_cap
    if not inv_lm2 > 0:
        raise DomainError("A and B_N do not correspond to a positive l_minus")
    return ModelParams(n, float(inv_lm2) ** -0.5, float(2 * a_cap) ** -0.5)
