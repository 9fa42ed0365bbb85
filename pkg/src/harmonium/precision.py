"""Arbitrary-precision scalars used throughout the package.

All high-precision numbers are ``gmpy2.mpfr`` values (MPFR: correctly rounded
binary floating point with a per-value mantissa size).  Precision is threaded
explicitly: every routine that computes beyond hardware precision takes a
``precision_bits`` argument and evaluates inside a local MPFR context, so
results never depend on ambient global state.
"""

from __future__ import annotations

import math
from fractions import Fraction

import gmpy2

HARDWARE_BITS = 53

# Precisions accepted by the command-line surface.  The library itself
# accepts any mantissa size >= 2.
PRECISION_CHOICES = (53, 128, 256, 512, 1024)


def context(precision_bits: int):
    """Return an MPFR context usable as ``with context(bits): ...``."""
    if precision_bits < 2:
        raise ValueError(f"precision_bits must be >= 2, got {precision_bits}")
    return gmpy2.context(precision=precision_bits)


def to_mpfr(x, precision_bits: int):
    """Convert ``x`` to an mpfr at the given precision.

    Floats, ints, Fractions and mpfr inputs convert without intermediate
    rounding beyond the single final rounding to ``precision_bits``.
    """
    with context(precision_bits):
        if isinstance(x, Fraction):
            return gmpy2.mpfr(gmpy2.mpq(x.numerator, x.denominator))
        return gmpy2.mpfr(x)


def exact_fraction(x) -> Fraction:
    """Exact rational value of a float/int/Fraction/mpfr (binary floats are rational)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, gmpy2.mpfr):
        num, den = x.as_integer_ratio()
        return Fraction(int(num), int(den))
    raise TypeError(f"cannot take exact rational value of {type(x).__name__}")


def significant_digits(precision_bits: int) -> int:
    """Decimal digits guaranteeing a lossless mpfr -> string -> mpfr round trip."""
    return int(math.ceil(precision_bits * math.log10(2))) + 2


def decimal_str(x, precision_bits: int | None = None) -> str:
    """Scientific-notation decimal string of an mpfr (or float) at full precision.

    The number of digits is chosen from ``precision_bits`` (default: the
    value's own precision) so that parsing the string back reproduces the
    value exactly.  Works for magnitudes far outside the double range.
    """
    if isinstance(x, float):
        return repr(x)
    # never reconvert an mpfr: that would re-round it to the ambient context
    v = x if isinstance(x, gmpy2.mpfr) else to_mpfr(x, precision_bits or 64)
    if gmpy2.is_nan(v):
        return "nan"
    if gmpy2.is_infinite(v):
        return "inf" if v > 0 else "-inf"
    if v == 0:
        return "0"
    bits = precision_bits if precision_bits is not None else v.precision
    ndig = significant_digits(bits)
    digits, exp10, _ = v.digits(10, ndig)
    sign = ""
    if digits.startswith("-"):
        sign, digits = "-", digits[1:]
    digits = digits.rstrip("0") or "0"
    mantissa = digits[0] + ("." + digits[1:] if len(digits) > 1 else "")
    return f"{sign}{mantissa}e{exp10 - 1:+03d}"


def log10_str(x, places: int = 6) -> str:
    """Base-10 logarithm of ``|x|`` as a short decimal string ('-inf' for 0)."""
    v = x if isinstance(x, gmpy2.mpfr) else to_mpfr(x, 64)
    if v == 0:
        return "-inf"
    with context(64):
        return f"{float(gmpy2.log10(abs(v))):.{places}f}"
