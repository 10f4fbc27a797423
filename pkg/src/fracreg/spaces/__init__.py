"""Periodic grids, Fourier multipliers and weighted function-space norms."""

from .grid import Field, SpaceGrid, SpaceTimeField
from .littlewood_paley import LPDecomposition, eta, lp_decompose, lp_square_function_norm, psi_hat
from .localization import Partition, partition_of_unity
from .multipliers import apply_multiplier, bessel_potential, bessel_symbol, derivative, symbol_values
from .norms import MixedNormSpec, mixed_norm, node_weights, sobolev_norm, temporal_norm, weighted_lp_norm
from .smoothness import holder_seminorm, kappa_prime, smoothness_norm, zygmund_seminorm

__all__ = [
    "Field",
    "LPDecomposition",
    "MixedNormSpec",
    "Partition",
    "SpaceGrid",
    "SpaceTimeField",
    "apply_multiplier",
    "bessel_potential",
    "bessel_symbol",
    "derivative",
    "eta",
    "holder_seminorm",
    "kappa_prime",
    "lp_decompose",
    "lp_square_function_norm",
    "mixed_norm",
    "node_weights",
    "partition_of_unity",
    "psi_hat",
    "smoothness_norm",
    "sobolev_norm",
    "symbol_values",
    "temporal_norm",
    "weighted_lp_norm",
    "zygmund_seminorm",
]
