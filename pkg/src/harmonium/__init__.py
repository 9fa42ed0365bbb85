"""Natural orbitals and occupation numbers of the N-harmonium ground state.

For spinless bosons the one-particle kernel is an exact Gibbs state of one
effective oscillator (closed-form geometric spectrum); for spinless fermions
the kernel carries a polynomial prefactor and is diagonalized as a truncated
high-precision eigenproblem over the bosonic natural-orbital basis.
"""

from .boson import BosonSpectrum, boson_kernel, boson_spectrum, mehler_check
from .errors import (
    ConvergenceError,
    DomainError,
    HarmoniumError,
    NoValidRoot,
    PrecisionError,
    SingularModel,
    UnderflowError,
)
from .fermion import (
    FermionPolynomial,
    HCoefficients,
    build_fermion_polynomial,
    fermion_polynomial_from_exponents,
    fermion_rdo_matrix,
    h_coefficients,
    ladder_position_matrix,
    quadrature_rdo_block,
    quadrature_rdo_element,
)
from .linalg import SymmetricMatrix, jacobi_eigh
from .model import (
    EffectiveOscillator,
    GaussianExponent,
    ModelParams,
    RdoExponent,
    effective_oscillator,
    from_coupling,
    gaussian_exponent,
    mehler_parameters,
    params_from_exponents,
    rdo_exponent,
)
from .numerics import (
    QuadratureRule,
    gauss_hermite,
    gaussian_moment,
    hermite_function,
    hermite_poly,
)
from .spectral import (
    DecayReport,
    NaturalSpectrum,
    alpha_root,
    boltzmann_exponent,
    boltzmann_series,
    build_decay_report,
    exponential_decay,
    exponential_series,
    fermi_gap,
    gaussian_decay,
    gaussian_series,
    natural_spectrum,
    plateau_estimate,
)

__version__ = "0.1.0"

__all__ = [
    "BosonSpectrum",
    "ConvergenceError",
    "DecayReport",
    "DomainError",
    "EffectiveOscillator",
    "FermionPolynomial",
    "GaussianExponent",
    "HCoefficients",
    "HarmoniumError",
    "ModelParams",
    "NaturalSpectrum",
    "NoValidRoot",
    "PrecisionError",
    "QuadratureRule",
    "RdoExponent",
    "SingularModel",
    "SymmetricMatrix",
    "UnderflowError",
    "alpha_root",
    "boltzmann_exponent",
    "boltzmann_series",
    "boson_kernel",
    "boson_spectrum",
    "build_decay_report",
    "build_fermion_polynomial",
    "effective_oscillator",
    "exponential_decay",
    "exponential_series",
    "fermi_gap",
    "fermion_polynomial_from_exponents",
    "fermion_rdo_matrix",
    "from_coupling",
    "gauss_hermite",
    "gaussian_decay",
    "gaussian_exponent",
    "gaussian_moment",
    "gaussian_series",
    "h_coefficients",
    "hermite_function",
    "hermite_poly",
    "jacobi_eigh",
    "ladder_position_matrix",
    "mehler_check",
    "mehler_parameters",
    "natural_spectrum",
    "params_from_exponents",
    "plateau_estimate",
    "quadrature_rdo_block",
    "quadrature_rdo_element",
    "rdo_exponent",
]
