"""Hermite polynomials and functions, Gaussian moments, Gauss-Hermite quadrature.

Everything here is precision-parameterized plumbing: the physics modules feed
these routines mpfr scalars and a ``precision_bits`` setting, and rely on the
quadrature rule as an independent oracle for kernel integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from .errors import ConvergenceError, DomainError
from .precision import context, to_mpfr

MAX_QUADRATURE_POINTS = 500


def hermite_poly(n: int, x):
    """Physicists' Hermite polynomial H_n(x) by the three-term recurrence.

    ``x`` may be a float, Fraction or mpfr; the arithmetic follows the input
    type (Fractions stay exact).
    """
    if n < 0:
        raise DomainError(f"Hermite order must be >= 0, got {n}")
    h_prev = x * 0 + 1  # one, in the arithmetic of x
    if n == 0:
        return h_prev
    h = 2 * x
    for k in range(1, n):
        h, h_prev = 2 * x * h - 2 * k * h_prev, h
    return h


def hermite_function(n: int, scale, x, precision_bits: int = 53):
    """Oscillator eigenfunction value phi_n(x) for length scale ``scale``.

    Evaluated through the normalized recurrence

        f_0 = pi^(-1/4) e^(-z^2/2),   f_1 = sqrt(2) z f_0,
        f_(k+1) = sqrt(2/(k+1)) z f_k - sqrt(k/(k+1)) f_(k-1),   z = x/scale,

    which carries the 1/sqrt(2^n n!) prefactor one factor per step, so no
    intermediate overflows or underflows occur up to n ~ 1000 even at 53 bits.
    """
    if n < 0:
        raise DomainError(f"Hermite order must be >= 0, got {n}")
    with context(precision_bits):
        s = gmpy2.mpfr(scale)
        if not s > 0:
            raise DomainError(f"scale must be positive, got {scale}")
        z = gmpy2.mpfr(x) / s
        pi = gmpy2.const_pi()
        f_prev = gmpy2.exp(-z * z / 2) / gmpy2.sqrt(gmpy2.sqrt(pi))
        if n == 0:
            return f_prev / gmpy2.sqrt(s)
        f = gmpy2.sqrt(gmpy2.mpfr(2)) * z * f_prev
        for k in range(1, n):
            f, f_prev = (
                gmpy2.sqrt(gmpy2.mpfr(2) / (k + 1)) * z * f
                - gmpy2.sqrt(gmpy2.mpfr(k) / (k + 1)) * f_prev,
                f,
            )
        return f / gmpy2.sqrt(s)


def gaussian_moment_rational(j: int) -> Fraction:
    """The moment integral over sqrt(pi): (j-1)!!/2^(j/2) for even j, 0 for odd."""
    if j < 0:
        raise DomainError(f"moment order must be >= 0, got {j}")
    if j % 2 == 1:
        return Fraction(0)
    dfact = 1
    for i in range(j - 1, 0, -2):
        dfact *= i
    return Fraction(dfact, 2 ** (j // 2))


def gaussian_moment(j: int, precision_bits: int = 53):
    """Integral of u^j e^(-u^2) over the real line."""
    rat = gaussian_moment_rational(j)
    with context(precision_bits):
        if rat == 0:
            return gmpy2.mpfr(0)
        return to_mpfr(rat, precision_bits) * gmpy2.sqrt(gmpy2.const_pi())


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule: integrates f(u) e^(-u^2) as sum(w_i f(x_i)).

    Nodes and weights are mpfr at the precision they were generated with,
    so extreme-node weights stay positive instead of underflowing.
    """

    nodes: tuple
    weights: tuple
    npoints: int

    def integrate(self, f):
        """Apply the rule to a callable f(x)."""
        acc = gmpy2.mpfr(0)
        for x, w in zip(self.nodes, self.weights):
            acc += w * f(x)
        return acc


def _hermite_norm_pair(n: int, x):
    """Orthonormal Hermite polynomial values (p_n(x), p_(n-1)(x)), weight-free."""
    pi = gmpy2.const_pi()
    p_prev = 1 / gmpy2.sqrt(gmpy2.sqrt(pi))
    if n == 0:
        return p_prev, gmpy2.mpfr(0)
    p = gmpy2.sqrt(gmpy2.mpfr(2)) * x * p_prev
    for k in range(1, n):
        p, p_prev = (
            gmpy2.sqrt(gmpy2.mpfr(2) / (k + 1)) * x * p
            - gmpy2.sqrt(gmpy2.mpfr(k) / (k + 1)) * p_prev,
            p,
        )
    return p, p_prev


def _semicircle_root_guesses(n: int) -> list[float]:
    """Asymptotic estimates of the positive zeros of H_n, descending.

    Writing x = sqrt(2n+1) u, the zero-counting (semicircle) law puts the
    j-th largest zero at (arcsin u + u sqrt(1-u^2))/pi = 1/2 - (j-1/2)/n;
    inverted by bisection.  Accurate to about a third of the local spacing
    uniformly in j and n, well inside the Newton basin of each simple root.
    """
    radius = math.sqrt(2 * n + 1)
    guesses = []
    for j in range(1, n // 2 + 1):
        target = 0.5 - (j - 0.5) / n
        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if (math.asin(mid) + mid * math.sqrt(1.0 - mid * mid)) / math.pi > target:
                hi = mid
            else:
                lo = mid
        guesses.append(radius * 0.5 * (lo + hi))
    return guesses


def gauss_hermite(npoints: int, precision_bits: int = 53) -> QuadratureRule:
    """Gauss-Hermite nodes and weights for weight e^(-u^2).

    Nodes are the roots of H_npoints found by Newton iteration started from
    the semicircle-law asymptotic estimates, largest root first, each iterate
    clamped to the bracket between neighboring estimates; weights are
    w_i = 1/(n p_(n-1)(x_i)^2) with p_k the orthonormal polynomials.  The
    iteration order is fixed, so the rule is deterministic for a given
    (npoints, precision_bits).
    """
    if not 1 <= npoints <= MAX_QUADRATURE_POINTS:
        raise DomainError(
            f"npoints must lie in 1..{MAX_QUADRATURE_POINTS}, got {npoints}"
        )
    work_bits = precision_bits + 24
    with context(work_bits):
        pi = gmpy2.const_pi()
        if npoints == 1:
            return QuadratureRule((gmpy2.mpfr(0),), (gmpy2.sqrt(pi),), 1)

        n = npoints
        tol = gmpy2.exp2(-(precision_bits + 8))
        guesses = _semicircle_root_guesses(n)
        pos_nodes = []  # strictly positive half, descending
        for i, guess in enumerate(guesses):
            hi = guesses[i - 1] if i > 0 else guess * 1.5 + 1.0
            lo = guesses[i + 1] if i + 1 < len(guesses) else 0.0
            b_hi = gmpy2.mpfr(0.5 * (guess + hi))
            b_lo = gmpy2.mpfr(0.5 * (guess + lo))
            x = gmpy2.mpfr(guess)
            converged = False
            for _ in range(200):
                p, p_lower = _hermite_norm_pair(n, x)
                dp = gmpy2.sqrt(gmpy2.mpfr(2 * n)) * p_lower
                if dp == 0:
                    break
                dx = p / dp
                x = x - dx
                if x >= b_hi:
                    x = b_hi
                elif x <= b_lo:
                    x = b_lo
                if abs(dx) <= tol * (1 + abs(x)):
                    converged = True
                    break
            if not converged:
                raise ConvergenceError(
                    f"Newton iteration for Gauss-Hermite node {i} of {n} failed"
                )
            if x <= 0 or (pos_nodes and x >= pos_nodes[-1]):
                raise ConvergenceError(
                    f"Gauss-Hermite node {i} of {n} left its bracket"
                )
            pos_nodes.append(x)

        nodes = []
        weights = []
        for x in pos_nodes:
            _, p_lower = _hermite_norm_pair(n, x)
            w = 1 / (n * p_lower * p_lower)
            nodes.append(x)
            weights.append(w)
        # Mirror to the negative axis; odd n keeps the exact center node.
        full_nodes = nodes[:]
        full_weights = weights[:]
        if n % 2 == 1:
            x0 = gmpy2.mpfr(0)
            _, p_lower = _hermite_norm_pair(n, x0)
            full_nodes.append(x0)
            full_weights.append(1 / (n * p_lower * p_lower))
        for x, w in zip(reversed(nodes), reversed(weights)):
            full_nodes.append(-x)
            full_weights.append(w)
        out_nodes = tuple(to_mpfr(x, precision_bits) for x in full_nodes)
        out_weights = tuple(to_mpfr(w, precision_bits) for w in full_weights)
        return QuadratureRule(out_nodes, out_weights, n)
