"""Complex-field analogues of the Selberg integral, with numerical verification.

The package evaluates the closed forms of the complex beta, Dirichlet,
Dotsenko-Fateev-Aomoto and triangular/trapezoid Selberg-type integrals, the
integrands on their left-hand sides, and a Monte Carlo engine that checks the
two against each other.
"""

from .closed_form import domain_check
from .errors import ComplexSelbergError
from .exponents import FieldExponent, as_exponent, complex_power, format_exponent, parse_exponent
from .gamma_field import beta_field, gamma_field
from .identities import IdentitySpec, evaluate_rhs
from .integrands import build_integrand
from .mc_engine import MonteCarloEstimate, SamplerSpec, integrate, verify

__all__ = [
    "ComplexSelbergError",
    "FieldExponent",
    "IdentitySpec",
    "MonteCarloEstimate",
    "SamplerSpec",
    "as_exponent",
    "beta_field",
    "build_integrand",
    "complex_power",
    "domain_check",
    "evaluate_rhs",
    "format_exponent",
    "gamma_field",
    "integrate",
    "parse_exponent",
    "verify",
]

__version__ = "0.1.0"
