"""Shared fixtures: the expensive spectra are computed once per session."""

import time

import pytest

from harmonium import ModelParams, fermion_rdo_matrix, natural_spectrum


@pytest.fixture(scope="session")
def small_run():
    """N=3, l+/l- = 1/2, m_max=60 at 128 bits: fast, strongly coupled."""
    p = ModelParams(3, 1.0, 0.5)
    mat = fermion_rdo_matrix(p, 60, 128)
    return p, mat, natural_spectrum(mat, 3)


@pytest.fixture(scope="session")
def medium_runs():
    """N=3, l+/l- = 4/5, m_max=240 at 256 and 512 bits (precision doubling)."""
    p = ModelParams(3, 1.0, 0.8)
    out = {}
    for bits in (256, 512):
        mat = fermion_rdo_matrix(p, 240, bits)
        out[bits] = natural_spectrum(mat, 3)
    return p, out


@pytest.fixture(scope="session")
def big_runs():
    """The figure-scale runs: N in {3, 5}, l+/l- = 4/5, m_max=400, 512 bits.

    Values are (params, matrix, spectrum, runtime_seconds) per N.
    """
    out = {}
    for n in (3, 5):
        started = time.perf_counter()
        p = ModelParams(n, 1.0, 0.8)
        mat = fermion_rdo_matrix(p, 400, 512)
        spectrum = natural_spectrum(mat, n)
        out[n] = (p, mat, spectrum, time.perf_counter() - started)
    return out
