"""Fermionic one-particle kernel: polynomial prefactor, matrix assembly, oracle.

The kernel is F_N(x, y) exp(-a(x^2+y^2) + b x y) with F_N a symmetric
polynomial of total degree 2(N-1).  Three independent routes live here:

* ``build_fermion_polynomial`` computes the coefficient table c[nu][mu] of
  F_N by exact rational algebra (Hermite-pair expansion of the reduction
  integral, Gaussian moments for the auxiliary variable), then normalizes so
  the kernel trace equals N.
* ``fermion_rdo_matrix`` assembles the operator sum(c[nu][mu] X^(2nu-mu) G X^mu)
  over the oscillator basis with scale L_N, using banded products; G is the
  diagonal Gibbs factor of the Gaussian kernel.
* ``quadrature_rdo_element`` integrates the kernel directly against two basis
  functions with a two-dimensional Gauss-Hermite rule, as an oracle for the
  assembled matrix elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import gmpy2

from .errors import DomainError, PrecisionError, SingularModel
from .linalg import SymmetricMatrix
from .model import (
    ModelParams,
    effective_oscillator,
    gaussian_exponent_fractions,
    rdo_exponent_fractions,
)
from .numerics import gauss_hermite, gaussian_moment_rational
from .precision import context, decimal_str, exact_fraction, to_mpfr

POLY_MIN_BITS = 128


# ---------------------------------------------------------------------------
# Exact trivariate polynomial algebra over Fractions.
# Keys are (a, i, j): powers of the rescaled auxiliary variable u-hat = p u,
# and of the rescaled coordinates x-tilde = sqrt(2A) x, y-tilde = sqrt(2A) y.
# Only even powers of u-hat and even total coordinate degree survive the
# integration, so all irrational scale factors reduce to rational ones.

def _poly_mul(pa: dict, pb: dict) -> dict:
    out: dict = {}
    for ka, ca in pa.items():
        for kb, cb in pb.items():
            key = (ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2])
            c = out.get(key)
            out[key] = ca * cb if c is None else c + ca * cb
    return {k: c for k, c in out.items() if c != 0}


def _poly_axpy(target: dict, poly: dict, factor: Fraction) -> None:
    for k, c in poly.items():
        nv = target.get(k, Fraction(0)) + factor * c
        if nv == 0:
            target.pop(k, None)
        else:
            target[k] = nv


def _hermite_of(arg: dict, order: int) -> list[dict]:
    """[H_0(z), ..., H_order(z)] for a polynomial argument z, exact."""
    polys = [{(0, 0, 0): Fraction(1)}]
    if order >= 1:
        polys.append({k: 2 * c for k, c in arg.items()})
    for k in range(1, order):
        nxt: dict = {}
        _poly_axpy(nxt, _poly_mul(arg, polys[k]), Fraction(2))
        _poly_axpy(nxt, polys[k - 1], Fraction(-2 * k))
        polys.append(nxt)
    return polys


@dataclass(frozen=True)
class FermionPolynomial:
    """Coefficient table of F_N: coeffs[nu][mu] multiplies x^(2nu-mu) y^mu.

    Normalized so that the kernel trace integral of F_N(x,x) e^(-(2a-b)x^2)
    equals N.  The table is exactly symmetric: coeffs[nu][mu] == coeffs[nu][2nu-mu].
    """

    n_particles: int
    coeffs: tuple
    precision_bits: int

    def coeff(self, nu: int, mu: int):
        return self.coeffs[nu][mu]

    def value(self, x, y):
        """Evaluate F_N(x, y); arithmetic follows the inputs' precision context."""
        acc = gmpy2.mpfr(0)
        xx = gmpy2.mpfr(x)
        yy = gmpy2.mpfr(y)
        for nu, row in enumerate(self.coeffs):
            for mu, c in enumerate(row):
                acc += c * xx ** (2 * nu - mu) * yy**mu
        return acc

    def to_json_dict(self) -> dict:
        return {
            "N": self.n_particles,
            "precision_bits": self.precision_bits,
            "coeffs": [
                [decimal_str(c, self.precision_bits) for c in row]
                for row in self.coeffs
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "FermionPolynomial":
        bits = int(data["precision_bits"])
        with context(bits):
            rows = tuple(
                tuple(gmpy2.mpfr(s) for s in row) for row in data["coeffs"]
            )
        return cls(int(data["N"]), rows, bits)


def fermion_polynomial_from_exponents(
    n: int, a_cap, b_cap, precision_bits: int = POLY_MIN_BITS
) -> FermionPolynomial:
    """F_N coefficients from exponent parameters (A, B_N), exact until rounding.

    Expands sum_k H_k(p u + q(x,y)) H_k(p u + q(y,x)) / (2^k k!) in rational
    arithmetic, integrates out u with Gaussian moments, rescales coordinates,
    and fixes the overall constant by the trace normalization.  ``a_cap`` and
    ``b_cap`` are taken at their exact binary values when given as floats.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    # 53 selects the hardware-precision path; any other request gets >= 128
    # (the algebra is exact either way, only the final rounding differs)
    bits = max(precision_bits, POLY_MIN_BITS) if precision_bits != 53 else 53
    a_cap = exact_fraction(a_cap)
    b_cap = exact_fraction(b_cap)
    denom = a_cap - (n - 1) * b_cap
    if denom <= 0:
        raise SingularModel("A - (N-1) B_N must be positive")
    b_small = (n - 1) * b_cap * b_cap / denom
    a_small = (a_cap - b_cap) - b_small / 2
    s = 2 * a_small - b_small
    if s <= 0:
        raise SingularModel("kernel is not trace class for these exponents")

    w = b_cap / (2 * denom)
    p_sq = b_cap / denom  # square of the auxiliary Hermite-argument scale
    z1 = {(1, 0, 0): Fraction(1), (0, 1, 0): 1 - w, (0, 0, 1): -w}
    z2 = {(1, 0, 0): Fraction(1), (0, 0, 1): 1 - w, (0, 1, 0): -w}
    h1 = _hermite_of(z1, n - 1)
    h2 = _hermite_of(z2, n - 1)
    integrand: dict = {}
    for k in range(n):
        _poly_axpy(
            integrand,
            _poly_mul(h1[k], h2[k]),
            Fraction(1, 2**k * math.factorial(k)),
        )

    # Integrate u-hat and undo the coordinate rescaling; odd powers vanish.
    raw: dict = {}
    two_a = 2 * a_cap
    for (au, i, j), c in integrand.items():
        if au % 2 == 1:
            continue
        val = c * p_sq ** (au // 2) * gaussian_moment_rational(au) * two_a ** ((i + j) // 2)
        key = (i, j)
        raw[key] = raw.get(key, Fraction(0)) + val

    table = [[Fraction(0)] * (2 * nu + 1) for nu in range(n)]
    for (i, j), c in raw.items():
        if (i + j) % 2 == 1 or i + j > 2 * (n - 1):
            raise AssertionError("reduction produced an inadmissible monomial")
        table[(i + j) // 2][j] = c
    for nu in range(n):
        for mu in range(2 * nu + 1):
            if table[nu][mu] != table[nu][2 * nu - mu]:
                raise AssertionError("coefficient table is not symmetric")

    # Trace normalization: integral of x^(2nu) e^(-s x^2) = (2nu-1)!!/(2s)^nu sqrt(pi/s).
    trace_rat = Fraction(0)
    for nu in range(n):
        weight = gaussian_moment_rational(2 * nu) * (Fraction(1) / s) ** nu
        trace_rat += sum(table[nu]) * weight
    if trace_rat <= 0:
        raise SingularModel("kernel trace is not positive")

    with context(bits):
        root = gmpy2.sqrt(to_mpfr(s, bits) / gmpy2.const_pi())
        factor = Fraction(n) / trace_rat
        rows = tuple(
            tuple(to_mpfr(c * factor, bits) * root for c in row) for row in table
        )
    return FermionPolynomial(n, rows, bits)


def build_fermion_polynomial(p: ModelParams, precision_bits: int = POLY_MIN_BITS) -> FermionPolynomial:
    """F_N coefficient table for a model, via its exact exponent parameters."""
    a_cap, b_cap = gaussian_exponent_fractions(p)
    return fermion_polynomial_from_exponents(p.n_particles, a_cap, b_cap, precision_bits)


# ---------------------------------------------------------------------------
# Banded operator algebra in the oscillator number basis.

def _band_identity(dim: int) -> dict:
    return {0: np.full(dim, gmpy2.mpfr(1), dtype=object)}


def _band_mul(ba: dict, bb: dict, dim: int) -> dict:
    out: dict = {}
    zero = gmpy2.mpfr(0)
    for oa, da in ba.items():
        for ob, db in bb.items():
            oc = oa + ob
            dst = out.get(oc)
            if dst is None:
                dst = np.full(dim, zero, dtype=object)
                out[oc] = dst
            lo = max(0, -oa, -oc)
            hi = min(dim, dim - oa, dim - oc)
            for i in range(lo, hi):
                dst[i] = dst[i] + da[i] * db[i + oa]
    return out


def ladder_position_matrix(m_max: int, scale, precision_bits: int = 53) -> SymmetricMatrix:
    """Position operator scale*(a + a-dagger)/sqrt(2) truncated to m_max states."""
    if m_max < 2:
        raise DomainError(f"m_max must be >= 2, got {m_max}")
    mat = SymmetricMatrix(m_max, precision_bits)
    with context(precision_bits):
        s = gmpy2.mpfr(scale)
        for m in range(m_max - 1):
            mat.set_entry(m, m + 1, s * gmpy2.sqrt(gmpy2.mpfr(m + 1) / 2))
    return mat


def _position_band(dim: int, scale) -> dict:
    """Banded form of the truncated position operator (same entries as above)."""
    up = np.full(dim, gmpy2.mpfr(0), dtype=object)
    down = np.full(dim, gmpy2.mpfr(0), dtype=object)
    for m in range(dim - 1):
        v = scale * gmpy2.sqrt(gmpy2.mpfr(m + 1) / 2)
        up[m] = v
        down[m + 1] = v
    return {1: up, -1: down}


def fermion_rdo_matrix(p: ModelParams, m_max: int, precision_bits: int) -> SymmetricMatrix:
    """Kernel matrix over the first m_max oscillator orbitals with scale L_N.

    The Gaussian factor contributes the diagonal G = sqrt(pi) L sqrt(1-q^2) q^m
    (its exact orbital expansion); at zero coupling this degenerates to the
    ground-state projector column, reproducing the step-function spectrum.
    Powers of the position operator are built on a padded dimension so every
    retained entry is free of truncation edge effects, and entries of odd
    index distance or beyond the polynomial bandwidth are exactly zero.

    The assembled trace is checked against N before the final rescale to
    exactly N; a deviation beyond 2^(-bits/4) relative (with m_max >= 10 N)
    signals a precision failure rather than being silently absorbed.
    """
    n = p.n_particles
    if m_max < n:
        raise DomainError(f"m_max must be >= N = {n}, got {m_max}")
    if precision_bits < 53:
        raise DomainError(f"precision_bits must be >= 53, got {precision_bits}")
    ratio = p.l_ratio()
    if not p.is_zero_coupling() and abs(ratio - 1.0) < 2.0 ** (-precision_bits / 4):
        raise PrecisionError(
            f"|l+/l- - 1| = {abs(ratio - 1.0):.3e} is below the resolvable "
            f"threshold 2^(-{precision_bits}/4); raise precision_bits or use "
            "zero coupling exactly"
        )

    poly = build_fermion_polynomial(p, precision_bits)
    osc = effective_oscillator(p, precision_bits)
    bits = precision_bits
    with context(bits):
        pad = m_max + 4 * max(n - 1, 1)
        q = osc.boltzmann_q
        gibbs = np.full(pad, gmpy2.mpfr(0), dtype=object)
        g0 = gmpy2.sqrt(gmpy2.const_pi()) * osc.length * gmpy2.sqrt(1 - q * q)
        qm = gmpy2.mpfr(1)
        for m in range(pad):
            gibbs[m] = g0 * qm
            qm = qm * q  # q = 0 leaves only the m = 0 entry

        x_band = _position_band(pad, osc.length)
        powers = [_band_identity(pad)]
        for _ in range(2 * (n - 1)):
            powers.append(_band_mul(powers[-1], x_band, pad))

        acc: dict = {}
        zero = gmpy2.mpfr(0)
        for nu in range(n):
            for mu in range(2 * nu + 1):
                c = poly.coeff(nu, mu)
                left = powers[2 * nu - mu]
                # left * diag(G): scale each band column-wise.
                scaled = {}
                for o, d in left.items():
                    nd = np.full(pad, zero, dtype=object)
                    lo, hi = max(0, -o), min(pad, pad - o)
                    for i in range(lo, hi):
                        nd[i] = d[i] * gibbs[i + o]
                    scaled[o] = nd
                term = _band_mul(scaled, powers[mu], pad)
                for o, d in term.items():
                    dst = acc.get(o)
                    if dst is None:
                        acc[o] = d * c
                    else:
                        acc[o] = dst + d * c

        mat = SymmetricMatrix(m_max, bits)
        for o, d in acc.items():
            if o < 0 or o % 2 == 1:
                continue  # filled from the upper bands; odd offsets never occur
            for i in range(0, m_max - o):
                upper = d[i]
                lower = acc[-o][i + o] if o != 0 and -o in acc else upper
                mat.set_entry(i, i + o, (upper + lower) / 2 if o != 0 else upper)

        tr = mat.trace()
        if tr <= 0:
            raise PrecisionError("assembled kernel matrix has non-positive trace")
        defect = abs(tr / n - 1)
        if m_max >= 10 * n and defect > gmpy2.exp2(-bits / 4):
            raise PrecisionError(
                f"trace defect {float(defect):.3e} exceeds 2^(-{bits}/4); "
                "increase m_max or precision_bits"
            )
        mat.scale_inplace(n / tr)
        return mat


# ---------------------------------------------------------------------------
# Quadrature oracle.

def _oracle_work_bits(precision_bits: int) -> int:
    return max(96, precision_bits + 32)


def _polynomial_basis_values(max_order: int, scale, xs) -> list:
    """Rows m = 0..max_order of the weight-free orbital polynomial at points xs.

    Row m holds phi_m(x) e^(x^2/(2 scale^2)), i.e. the Hermite polynomial part
    with its normalization prefactor; the Gaussian lives in the quadrature rule.
    """
    pi = gmpy2.const_pi()
    pref = 1 / (gmpy2.sqrt(gmpy2.sqrt(pi)) * gmpy2.sqrt(scale))
    rows = []
    row0 = np.array([pref for _ in xs], dtype=object)
    rows.append(row0)
    if max_order >= 1:
        z = np.array([x / scale for x in xs], dtype=object)
        rows.append(gmpy2.sqrt(gmpy2.mpfr(2)) * z * row0)
        for k in range(1, max_order):
            rows.append(
                gmpy2.sqrt(gmpy2.mpfr(2) / (k + 1)) * z * rows[k]
                - gmpy2.sqrt(gmpy2.mpfr(k) / (k + 1)) * rows[k - 1]
            )
    return rows


def quadrature_rdo_block(
    p: ModelParams, max_order: int, npoints: int, precision_bits: int = 53
) -> np.ndarray:
    """All kernel matrix elements up to max_order by direct 2D integration.

    Substituting x = u/sqrt(t) with t = a + 1/(2 L^2) folds the full Gaussian
    decay of integrand and basis functions into the rule weight; the remaining
    cross factor e^((b/t) u v) is bounded by the trace-class condition b < 2t.
    Requires npoints >= 2(2 max_order + 2(N-1)), the strictest element in the
    block.  Returns an (max_order+1)^2 object array of mpfr at precision_bits.
    """
    if npoints < 2 * (2 * max_order + 2 * (p.n_particles - 1)):
        raise DomainError(
            f"npoints = {npoints} is below the required "
            f"{2 * (2 * max_order + 2 * (p.n_particles - 1))} for max_order {max_order}"
        )
    return _quadrature_block_impl(p, max_order, npoints, precision_bits)


def _quadrature_block_impl(
    p: ModelParams, max_order: int, npoints: int, precision_bits: int
) -> np.ndarray:
    work = _oracle_work_bits(precision_bits)
    poly = build_fermion_polynomial(p, work)
    osc = effective_oscillator(p, work)
    a_small, b_small, _ = rdo_exponent_fractions(p)
    rule = gauss_hermite(npoints, work)
    with context(work):
        length = osc.length
        a = to_mpfr(a_small, work)
        b = to_mpfr(b_small, work)
        t = a + 1 / (2 * length * length)
        rt = gmpy2.sqrt(t)
        xs = [u / rt for u in rule.nodes]
        basis = _polynomial_basis_values(max_order, length, xs)
        npts = len(xs)
        kernel = np.empty((npts, npts), dtype=object)
        bot = b / t
        for i in range(npts):
            ui = rule.nodes[i]
            wi = rule.weights[i]
            for j in range(npts):
                kernel[i, j] = (
                    wi
                    * rule.weights[j]
                    * poly.value(xs[i], xs[j])
                    * gmpy2.exp(bot * ui * rule.nodes[j])
                )
        out = np.empty((max_order + 1, max_order + 1), dtype=object)
        for m in range(max_order + 1):
            km = kernel * basis[m][:, None]
            for nn in range(m, max_order + 1):
                val = (km * basis[nn][None, :]).sum() / t
                out[m, nn] = to_mpfr(val, precision_bits)
                out[nn, m] = out[m, nn]
        return out


def quadrature_rdo_element(
    p: ModelParams, m: int, n: int, npoints: int, precision_bits: int = 53
):
    """Single kernel matrix element by direct 2D Gauss-Hermite integration."""
    if m < 0 or n < 0:
        raise DomainError("orbital indices must be >= 0")
    if npoints < 2 * (m + n + 2 * (p.n_particles - 1)):
        raise DomainError(
            f"npoints = {npoints} is below the required 2(m+n+2(N-1)) = "
            f"{2 * (m + n + 2 * (p.n_particles - 1))}"
        )
    block = _quadrature_block_impl(p, max(m, n), npoints, precision_bits)
    return block[m, n]


# ---------------------------------------------------------------------------
# Asymptotic band coefficients.

@dataclass(frozen=True)
class HCoefficients:
    """Asymptotic coefficients h_r of the band r = -(N-1)..(N-1).

    h_r multiplies the amplitude on the state 2r below the source index in the
    large-index limit of the assembled operator, up to a single global factor
    shared by all r (the Gibbs normalization and trace rescale).
    """

    n_particles: int
    values: tuple  # indexed by r + (N-1)

    def h(self, r: int):
        off = self.n_particles - 1
        if not -off <= r <= off:
            raise DomainError(f"band index r must lie in [-{off}, {off}], got {r}")
        return self.values[r + off]

    def as_dict(self) -> dict:
        off = self.n_particles - 1
        return {r - off: v for r, v in enumerate(self.values)}


def h_coefficients(p: ModelParams, precision_bits: int = 53) -> HCoefficients:
    """Band coefficients h_r from the polynomial table and oscillator constants.

        h_r = sum over nu, mu, kappa, tau with nu - kappa - tau = r of
              (L^2/2)^nu c[nu][mu] C(mu, kappa) q^(2 kappa - mu) C(2nu - mu, tau)

    The (L^2/2)^nu weight is the one the position-operator convention
    x = L (a + a-dagger)/sqrt(2) induces, which is what the matrix-element
    limit test requires.  Requires nonzero coupling for N >= 2 (otherwise the
    Gibbs factor degenerates and no band limit exists).
    """
    n = p.n_particles
    poly = build_fermion_polynomial(p, precision_bits)
    osc = effective_oscillator(p, precision_bits)
    if n >= 2 and osc.beta_infinite:
        raise DomainError("band coefficients require nonzero coupling for N >= 2")
    with context(precision_bits):
        values = [gmpy2.mpfr(0) for _ in range(2 * n - 1)]
        s2 = osc.length * osc.length / 2
        q = osc.boltzmann_q
        for nu in range(n):
            weight_nu = s2**nu
            for mu in range(2 * nu + 1):
                c = poly.coeff(nu, mu) * weight_nu
                for kappa in range(mu + 1):
                    qfac = q ** (2 * kappa - mu) if n >= 2 else gmpy2.mpfr(1)
                    ck = math.comb(mu, kappa) * qfac
                    for tau in range(2 * nu - mu + 1):
                        r = nu - kappa - tau
                        values[r + n - 1] += c * ck * math.comb(2 * nu - mu, tau)
        return HCoefficients(n, tuple(values))
