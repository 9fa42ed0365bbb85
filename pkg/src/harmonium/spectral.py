"""Natural spectrum extraction and the asymptotic-decay diagnostics.

The kernel matrix couples only equal-parity orbitals, so the two parity
blocks are diagonalized independently (which also makes the opposite-parity
components of every eigenvector exactly zero) and merged into one descending
spectrum.  The decay estimators invert the three asymptotic laws: algebraic
times Boltzmann for the occupations, Gaussian for the coefficient tail above
the orbital index, exponential below it.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import cmp_to_key

import numpy as np
import gmpy2

from .errors import DomainError, NoValidRoot, PrecisionError
from .errors import UnderflowError as FloorError
from .fermion import HCoefficients
from .linalg import SymmetricMatrix, jacobi_eigh
from .precision import context, decimal_str

FLOOR_GUARD_BITS = 32
PSD_GUARD_DIV = 2  # smallest eigenvalue must exceed -2^(-bits/2) lambda_max


@dataclass(frozen=True)
class NaturalSpectrum:
    """Descending occupations with parity labels and expansion vectors.

    ``occupations[k]`` is the k-th natural occupation number (mpfr),
    ``vectors[k]`` its expansion over the oscillator basis (object array,
    exactly zero on the opposite parity).  ``floor`` is the absolute level
    below which occupations are treated as numerically void: 2^(-bits+32)
    times the smallest positive diagonal scale of the source matrix, the
    smallest magnitude whose relative accuracy the graded Jacobi run can
    still certify.  ``vector_floor`` plays the same role for unit-norm
    vector components, where the scale is 1.
    """

    occupations: tuple
    parities: tuple
    vectors: tuple
    m_max: int
    precision_bits: int
    n_particles: int
    floor: object
    vector_floor: object

    def below_floor(self, k: int) -> bool:
        return not self.occupations[k] > self.floor

    def dominant_index(self, k: int) -> int:
        vec = self.vectors[k]
        best, best_abs = 0, abs(vec[0])
        for m in range(1, len(vec)):
            a = abs(vec[m])
            if a > best_abs:
                best, best_abs = m, a
        return best


def _compare_eigenpairs(x, y):
    # Descending occupation, then even before odd, then lower dominant index.
    if x[0] != y[0]:
        return -1 if x[0] > y[0] else 1
    if x[1] != y[1]:
        return -1 if x[1] == "even" else 1
    if x[2] != y[2]:
        return -1 if x[2] < y[2] else 1
    return 0


def natural_spectrum(mat: SymmetricMatrix, n_particles: int) -> NaturalSpectrum:
    """Diagonalize the parity blocks of a kernel matrix and merge the spectra."""
    dim = mat.dim
    bits = mat.precision_bits
    with context(bits):
        pairs = []
        for parity, indices in (
            ("even", list(range(0, dim, 2))),
            ("odd", list(range(1, dim, 2))),
        ):
            if not indices:
                continue
            block = mat.submatrix(indices)
            eigenvalues, eigenvectors = jacobi_eigh(block)
            zero = gmpy2.mpfr(0)
            for lam, vec in zip(eigenvalues, eigenvectors):
                full = np.full(dim, zero, dtype=object)
                for pos, m in enumerate(indices):
                    full[m] = vec[pos]
                # Sign convention: largest-magnitude component positive.
                dom, dom_abs = 0, abs(full[0])
                for m in range(1, dim):
                    a = abs(full[m])
                    if a > dom_abs:
                        dom, dom_abs = m, a
                if full[dom] < 0:
                    full = -full
                pairs.append((lam, parity, dom, full))

        lam_max = max((x[0] for x in pairs))
        psd_floor = -gmpy2.exp2(-(bits // PSD_GUARD_DIV)) * lam_max
        min_scale = None
        for i in range(dim):
            d = mat.entry(i, i)
            if d > 0 and (min_scale is None or d < min_scale):
                min_scale = d
        floor = gmpy2.exp2(-(bits - FLOOR_GUARD_BITS)) * (
            min_scale if min_scale is not None else gmpy2.mpfr(0)
        )
        vector_floor = gmpy2.exp2(-(bits - FLOOR_GUARD_BITS))

        cleaned = []
        for lam, parity, dom, vec in pairs:
            if lam < 0:
                if lam < psd_floor:
                    raise PrecisionError(
                        f"negative occupation {float(lam):.3e} violates positive "
                        "semidefiniteness beyond the precision guard"
                    )
                lam = gmpy2.mpfr(0)
            cleaned.append((lam, parity, dom, vec))
        cleaned.sort(key=cmp_to_key(_compare_eigenpairs))

        total = gmpy2.mpfr(0)
        for lam, _, _, _ in cleaned:
            total += lam
        if abs(total / n_particles - 1) > gmpy2.exp2(-(bits // 4)):
            raise PrecisionError(
                f"occupation sum {float(total)} deviates from N = {n_particles} "
                "beyond the precision guard"
            )

        return NaturalSpectrum(
            occupations=tuple(x[0] for x in cleaned),
            parities=tuple(x[1] for x in cleaned),
            vectors=tuple(x[3] for x in cleaned),
            m_max=dim,
            precision_bits=bits,
            n_particles=n_particles,
            floor=floor,
            vector_floor=vector_floor,
        )


# ---------------------------------------------------------------------------
# Decay estimators.

def boltzmann_exponent(spectrum: NaturalSpectrum, n_particles: int, k: int) -> float:
    """-ln(lambda_k k^-(N-1)) / (k + 1/2); plateaus at beta hbar Omega."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    lam = spectrum.occupations[k]
    if spectrum.below_floor(k):
        raise FloorError(f"occupation {k} is at the precision floor")
    with context(max(64, spectrum.precision_bits)):
        val = -(gmpy2.log(lam) - (n_particles - 1) * gmpy2.log(k)) / (k + gmpy2.mpfr(1) / 2)
        return float(val)


def _vector_component(spectrum: NaturalSpectrum, k: int, m: int):
    if not 0 <= k < len(spectrum.occupations):
        raise DomainError(f"orbital index k = {k} out of range")
    if not 0 <= m < spectrum.m_max:
        raise DomainError(f"basis index m = {m} out of range")
    if (m - k) % 2 != 0:
        raise DomainError(f"m = {m} and k = {k} have different parity")
    z = spectrum.vectors[k][m]
    if not abs(z) > spectrum.vector_floor:
        raise FloorError(f"coefficient ({k}, {m}) is at the precision floor")
    return z


def gaussian_decay(spectrum: NaturalSpectrum, k: int, m: int) -> float:
    """-ln|zeta_m^(k)| / (m-k)^2 for m > k; plateaus at beta hbar Omega / (4(N-1))."""
    if m <= k:
        raise DomainError(f"gaussian_decay needs m > k, got m = {m}, k = {k}")
    z = _vector_component(spectrum, k, m)
    with context(max(64, spectrum.precision_bits)):
        return float(-gmpy2.log(abs(z)) / (m - k) ** 2)


def exponential_decay(spectrum: NaturalSpectrum, k: int, m: int) -> float:
    """-ln|zeta_m^(k)| / (k-m) for m < k; plateaus at Re(alpha_N)."""
    if m >= k:
        raise DomainError(f"exponential_decay needs m < k, got m = {m}, k = {k}")
    z = _vector_component(spectrum, k, m)
    with context(max(64, spectrum.precision_bits)):
        return float(-gmpy2.log(abs(z)) / (k - m))


def boltzmann_series(spectrum: NaturalSpectrum, n_particles: int, k_lo: int = 1,
                     k_hi: int | None = None) -> list[tuple[int, float]]:
    """(k, estimate) pairs over the occupations that sit above the floor."""
    k_hi = len(spectrum.occupations) - 1 if k_hi is None else k_hi
    out = []
    for k in range(k_lo, k_hi + 1):
        if spectrum.below_floor(k):
            continue
        out.append((k, boltzmann_exponent(spectrum, n_particles, k)))
    return out


def gaussian_series(spectrum: NaturalSpectrum, k: int) -> list[tuple[int, float]]:
    """(m, estimate) pairs for m > k of matching parity, above the floor."""
    out = []
    for m in range(k + 2, spectrum.m_max, 2):
        try:
            out.append((m, gaussian_decay(spectrum, k, m)))
        except FloorError:
            break
    return out


def exponential_series(spectrum: NaturalSpectrum, k: int) -> list[tuple[int, float]]:
    """(m, estimate) pairs for m < k of matching parity, above the floor."""
    out = []
    for m in range(k - 2, -1, -2):
        try:
            out.append((m, exponential_decay(spectrum, k, m)))
        except FloorError:
            break
    return out


def running_mean(values: list[float], window: int = 20) -> list[float]:
    """Trailing mean over ``window`` points (shorter at the start)."""
    out = []
    acc = 0.0
    for i, v in enumerate(values):
        acc += v
        if i >= window:
            acc -= values[i - window]
        out.append(acc / min(i + 1, window))
    return out


def plateau_estimate(series: list[float]) -> tuple[float, float]:
    """Two readings of the asymptote of a convergent series.

    Returns (tail mean over the last 20 percent of points, intercept of a
    least-squares fit v = a + b/i over the last half); together they bracket
    the plot-reading error of the limit.
    """
    if not series:
        raise DomainError("cannot estimate a plateau from an empty series")
    n = len(series)
    tail = series[max(0, n - max(1, n // 5)):]
    tail_mean = sum(tail) / len(tail)
    half = series[n // 2:]
    if len(half) < 3:
        return tail_mean, tail_mean
    xs = np.array([1.0 / (n // 2 + 1 + i) for i in range(len(half))])
    ys = np.array(half)
    coeffs = np.polyfit(xs, ys, 1)
    return tail_mean, float(coeffs[1])


def alpha_root(h: HCoefficients) -> complex:
    """Decay exponent of the coefficient tail below the orbital index.

    Solves sum_r (h_r/h_0) t^(-r) = 0 as a degree-2(N-1) polynomial in
    t = e^(2 alpha) (companion-matrix roots at hardware precision).  The h
    table satisfies h_(-r) = q^(2r) h_r exactly, so roots pair as
    alpha <-> beta - alpha with beta = -ln q; equivalently tau = t q pairs
    as (tau, 1/tau), the mode pairs of the symmetrized band operator.  The
    realized tail decays at that operator's slowest stable rate, i.e. the
    admissible roots are those with Re(alpha) > beta/2 (|tau| > 1) and the
    smallest real part among them is returned.  For a symmetric table
    (q = 1, beta = 0) this reduces to the plain Re(alpha) > 0 rule.
    """
    n = h.n_particles
    if n < 2:
        raise DomainError("alpha root requires N >= 2")
    h0 = h.h(0)
    if h0 == 0:
        raise DomainError("h_0 must be nonzero")
    off = n - 1
    q2 = 1.0
    if h.h(off) != 0:
        ratio = float(h.h(-off) / h.h(off))
        if ratio > 0:
            q2 = ratio ** (1.0 / off)
    # Coefficient of t^j is h_(N-1-j)/h_0, j = 0..2(N-1); numpy wants highest first.
    coeffs = [float(h.h(n - 1 - j) / h0) for j in range(2 * (n - 1) + 1)]
    poly = np.array(coeffs[::-1], dtype=float)
    if not np.any(poly != 0):
        raise NoValidRoot("band polynomial is identically zero")
    roots = np.roots(poly)
    candidates = []
    for t in roots:
        if t == 0:
            continue
        if abs(t) ** 2 * q2 <= 1 + 1e-12:
            continue
        candidates.append(0.5 * cmath.log(complex(t)))
    if not candidates:
        raise NoValidRoot("no root decaying toward small indices")
    return min(candidates, key=lambda a: a.real)


def fermi_gap(spectrum: NaturalSpectrum, n_particles: int) -> float:
    """Occupation drop across the Fermi level: lambda_(N-1) - lambda_N."""
    if len(spectrum.occupations) <= n_particles:
        raise DomainError("spectrum too short to straddle the Fermi level")
    return float(spectrum.occupations[n_particles - 1] - spectrum.occupations[n_particles])


@dataclass(frozen=True)
class DecayReport:
    """Bundle of every asymptotic diagnostic for one spectrum."""

    boltzmann_estimates: list
    gaussian_estimates: dict
    exp_estimates: dict
    alpha: complex | None
    gap: float


def build_decay_report(spectrum: NaturalSpectrum, n_particles: int,
                       h: HCoefficients | None = None,
                       ks: tuple = ()) -> DecayReport:
    alpha = None
    if h is not None and n_particles >= 2:
        try:
            alpha = alpha_root(h)
        except NoValidRoot:
            alpha = None
    return DecayReport(
        boltzmann_estimates=boltzmann_series(spectrum, n_particles),
        gaussian_estimates={k: gaussian_series(spectrum, k) for k in ks},
        exp_estimates={k: exponential_series(spectrum, k) for k in ks},
        alpha=alpha,
        gap=fermi_gap(spectrum, n_particles),
    )


# ---------------------------------------------------------------------------
# CSV exports (full-precision decimal strings; values below the double range
# stay readable through the log10 column).

def spectrum_csv_rows(spectrum: NaturalSpectrum) -> list[str]:
    rows = ["k,lambda,lambda_log10,parity"]
    with context(max(64, spectrum.precision_bits)):
        for k, lam in enumerate(spectrum.occupations):
            log10 = (
                f"{float(gmpy2.log10(lam)):.10f}" if lam > 0 else "-inf"
            )
            rows.append(
                f"{k},{decimal_str(lam, spectrum.precision_bits)},{log10},"
                f"{spectrum.parities[k]}"
            )
    return rows


def vectors_csv_rows(spectrum: NaturalSpectrum, ks) -> list[str]:
    rows = ["k,m,zeta"]
    for k in ks:
        vec = spectrum.vectors[k]
        for m in range(spectrum.m_max):
            rows.append(f"{k},{m},{decimal_str(vec[m], spectrum.precision_bits)}")
    return rows
