"""Weighted Lebesgue, Bessel-potential and mixed space-time norms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from ..frac_calc import TimeGrid
from ..weights import Weight, cell_integrals
from .grid import Field, SpaceGrid, SpaceTimeField
from .multipliers import bessel_potential

__all__ = [
    "MixedNormSpec",
    "mixed_norm",
    "node_weights",
    "sobolev_norm",
    "temporal_norm",
    "weighted_lp_norm",
]


def _spatial(w: Weight, grid: SpaceGrid) -> Weight:
    if w.dim != grid.d:
        raise ValueError(f"weight dimension {w.dim} does not match grid dimension {grid.d}")
    if w.kind != "tabulated" and (w.lo, w.hi) != (-grid.L, grid.L):
        w = w.on_domain(-grid.L, grid.L)
    return w


@lru_cache(maxsize=128)
def _node_weights_cached(w: Weight, d: int, L: float, n: int) -> np.ndarray:
    h = 2 * L / n
    c = cell_integrals(w, n, L, eps=h / 2)
    c.setflags(write=False)
    return c


def node_weights(w: Weight, grid: SpaceGrid) -> np.ndarray:
    """Quadrature weights ``c_i = int_{cell i} w``; the cells tile the box."""
    w = _spatial(w, grid)
    return _node_weights_cached(w, grid.d, float(grid.L), grid.n)


def weighted_lp_norm(u: Field, p: float, w: Weight) -> float:
    """``(sum_i |u_i|^p c_i)^(1/p)`` with exact cell integrals of the weight."""
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    c = node_weights(w, u.grid)
    a = np.abs(u.values)
    m = a.max()
    if m == 0:
        return 0.0
    # scale out the maximum to keep |u|^p in range for large p
    return float(m * np.sum((a / m) ** p * c) ** (1.0 / p))


def sobolev_norm(u: Field, gamma: float, p: float, w: Weight) -> float:
    """``|| (1 - Laplacian)^(gamma/2) u ||_{L_p(w)}``."""
    return weighted_lp_norm(bessel_potential(u, gamma), p, w)


@dataclass(frozen=True)
class MixedNormSpec:
    """Parameters ``(q, p, gamma, w2, w1, T)`` of a space-time norm."""

    q: float
    p: float
    gamma: float
    w2: Weight
    w1: Weight
    T: float

    def __post_init__(self):
        if not (self.q > 1 and self.p > 1):
            raise ValueError("mixed norms need p, q > 1")
        if self.w2.dim != 1:
            raise ValueError("temporal weight must be one-dimensional")
        if not self.T > 0:
            raise ValueError("final time must be positive")

    def with_gamma(self, gamma: float) -> MixedNormSpec:
        return MixedNormSpec(self.q, self.p, gamma, self.w2, self.w1, self.T)


_GL = np.polynomial.legendre.leggauss(8)


@lru_cache(maxsize=64)
def _time_rule(tgrid: TimeGrid, w2: Weight) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-cell quadrature: local coordinates in ``[0, 1]`` and weights.

    The weights already include ``w2`` and the cell length, so a sum of
    ``f(t_q) * wts`` approximates ``int f w2 dt``.
    """
    t = tgrid.nodes
    h = np.diff(t)
    x, gw = _GL
    theta = np.tile(0.5 * (x + 1.0), (tgrid.N, 1))
    tq = t[:-1, None] + h[:, None] * theta
    wts = 0.5 * gw[None, :] * h[:, None] * w2(tq)
    if w2.kind == "power" and w2.center[0] == 0.0:
        lam = w2.exponent
        # first cell: int_0^h f(t) t^lam dt by Gauss-Jacobi with weight (1+x)^lam
        xj, wj = roots_jacobi(8, 0.0, lam)
        theta[0] = 0.5 * (xj + 1.0)
        wts[0] = w2.coef * wj * (h[0] / 2.0) ** (lam + 1.0)
    for a in (theta, wts):
        a.setflags(write=False)
    return theta, wts, h


def temporal_norm(values: np.ndarray, tgrid: TimeGrid, q: float, w2: Weight) -> float:
    """``(int_0^T |s(t)|^q w2(t) dt)^(1/q)`` for nodal values ``s`` interpolated linearly."""
    s = np.asarray(values, dtype=float)
    if s.shape != (tgrid.N + 1,):
        raise ValueError("one value per time node expected")
    if w2.kind != "tabulated" and w2.lo != 0.0:
        raise ValueError("temporal weights live on (0, T)")
    theta, wts, _ = _time_rule(tgrid, w2)
    sq = s[:-1, None] * (1.0 - theta) + s[1:, None] * theta
    m = np.abs(s).max()
    if m == 0:
        return 0.0
    return float(m * np.sum(np.abs(sq / m) ** q * wts) ** (1.0 / q))


def mixed_norm(F: SpaceTimeField, spec: MixedNormSpec) -> float:
    """``(int_0^T ||F(t)||_{H^gamma_p(w1)}^q w2(t) dt)^(1/q)`` over ``F``'s time grid."""
    if F.tgrid.T > spec.T * (1 + 1e-12):
        raise ValueError(f"field extends to T = {F.tgrid.T} beyond the norm's T = {spec.T}")
    if spec.w1.dim != F.sgrid.d:
        raise ValueError("spatial weight dimension does not match the field")
    w2 = spec.w2
    per_slice = np.array([sobolev_norm(s, spec.gamma, spec.p, spec.w1) for s in F.slices()])
    return temporal_norm(per_slice, F.tgrid, spec.q, w2)
