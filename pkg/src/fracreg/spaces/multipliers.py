"""Fourier multipliers on periodic grids."""

from __future__ import annotations

import numpy as np

from .grid import Field, SpaceGrid

__all__ = [
    "apply_multiplier",
    "bessel_potential",
    "bessel_symbol",
    "derivative",
    "symbol_values",
]


def symbol_values(m, grid: SpaceGrid, at_zero=None) -> np.ndarray:
    """Evaluate ``m(xi)`` on the grid's real-FFT frequency layout.

    ``m`` receives a tuple of broadcastable frequency arrays, one per axis.
    ``at_zero`` overrides the value at ``xi = 0`` for symbols singular there.
    """
    xi = grid.freqs
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        vals = np.asarray(m(xi))
    vals = np.broadcast_to(vals, grid.abs_freq.shape).copy()
    if at_zero is not None:
        vals[(0,) * grid.d] = at_zero
    bad = ~np.isfinite(vals)
    if np.any(bad):
        idx = np.argwhere(bad)[0]
        where = tuple(float(np.broadcast_to(k, grid.abs_freq.shape)[tuple(idx)]) for k in xi)
        raise ValueError(f"multiplier is not finite at frequency xi = {where}")
    return vals


def apply_multiplier(m, u: Field, at_zero=None) -> Field:
    """``F^{-1}(m * F u)`` on the periodic grid; the result is real."""
    vals = symbol_values(m, u.grid, at_zero)
    spec = np.fft.rfftn(u.values)
    out = np.fft.irfftn(spec * vals, s=u.grid.shape, axes=tuple(range(u.grid.d)))
    return Field(u.grid, out)


def bessel_symbol(xi, gamma: float):
    """``(1 + |xi|^2) ** (gamma / 2)``."""
    return (1.0 + sum(k**2 for k in xi)) ** (gamma / 2.0)


def bessel_potential(u: Field, gamma: float) -> Field:
    """``(1 - Laplacian) ** (gamma / 2) u``."""
    if gamma == 0:
        return Field(u.grid, u.values.copy())
    # looked up at call time so the symbol can be swapped out for mutation tests
    return apply_multiplier(lambda xi: bessel_symbol(xi, gamma), u)


def derivative(u: Field, orders) -> Field:
    """Spectral partial derivative ``D^orders u`` (one order per axis).

    Odd derivatives zero the Nyquist mode, which has no real derivative.
    """
    orders = tuple(orders) if np.ndim(orders) else (int(orders),)
    if len(orders) != u.grid.d:
        raise ValueError("need one derivative order per axis")
    if not any(orders):
        return Field(u.grid, u.values.copy())
    def sym(xi):
        out = 1.0
        for k, o in zip(xi, orders):
            if o:
                kk = np.where(np.isclose(np.abs(k), u.grid.nyquist), 0.0, k) if o % 2 else k
                out = out * (1j * kk) ** o
        return out

    return apply_multiplier(sym, u)
