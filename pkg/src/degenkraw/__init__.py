"""Exact arithmetic for the degenerate Pascal measure and its
Krawtchouk-Appell polynomial families."""

from .combinat import (
    bell_partial,
    bracket_y,
    compositions,
    deg_falling,
    epsilon,
    epsilon_closed,
    eta,
    faa_derivative,
    kappa,
    rho_scaling,
    stirling1,
    stirling2,
    varpi,
    varrho,
)
from .config import Config, ConfigError, load_config
from .measure import (
    DomainError,
    MeasureModel,
    Params,
    classical_pmf,
    deg_exp,
    deg_exp_series,
    exact_moments,
    laplace_series,
)
from .operators import (
    ChaosVector,
    chaos_to_poly,
    poly_to_chaos,
    scale_expansion,
    scale_substitution,
    translate,
)
from .polys import (
    CoeffTable,
    K_bell,
    K_epsilon,
    K_from_P,
    K_series,
    K_stirling,
    P_bell,
    P_from_K,
    P_from_K_stirling2,
    P_series,
    PolyFamily,
    addition_P3,
    addition_P4,
    c_coeffs,
    classical_K,
    coeff_table,
    family,
    monomial_from_K,
    mu_coeffs,
    xi_derivs,
)
from .sampling import sample, tv_distance
from .series import NonInvertibleSeries, TSeries, XPoly, XYPoly, gen_binomial

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
