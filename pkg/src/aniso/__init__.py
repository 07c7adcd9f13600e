"""Anisotropic Sobolev spaces X^s_{r,delta} as computable objects.

Weights, grid and rectangle norms, threshold quadratures, witness families,
and spectral traveling-wave solvers.
"""

from aniso.errors import DivergenceError, DomainError, InconsistencyError, PreconditionError
from aniso.multipliers import (
    SpaceParams,
    SymbolSpec,
    linear_symbol,
    mu_weight,
    omega_weight,
    phi_eval,
)
from aniso.spectral import (
    SpectralField,
    SpectralGrid,
    apply_multiplier,
    forward_transform,
    inverse_transform,
    make_grid,
    pointwise_product,
)

__all__ = [
    "DivergenceError",
    "DomainError",
    "InconsistencyError",
    "PreconditionError",
    "SpaceParams",
    "SymbolSpec",
    "SpectralField",
    "SpectralGrid",
    "apply_multiplier",
    "forward_transform",
    "inverse_transform",
    "linear_symbol",
    "make_grid",
    "mu_weight",
    "omega_weight",
    "phi_eval",
    "pointwise_product",
]
