"""Smooth partitions of unity subordinate to balls of radius delta_1."""

from __future__ import annotations

import itertools

import numpy as np

from .grid import Field, SpaceGrid
from .multipliers import derivative

__all__ = ["Partition", "partition_of_unity"]


class Partition(list):
    """List of bump fields ``zeta_k`` summing to one, with derivative bounds.

    ``derivative_sums[sigma]`` is ``max_x sum_k |D^sigma zeta_k(x)|``.
    """

    def __init__(self, fields, derivative_sums):
        super().__init__(fields)
        self.derivative_sums = derivative_sums

    def lower_bound(self, p: float) -> float:
        """``min_x sum_k |zeta_k(x)|^p``; positive for every ``p``."""
        s = sum(np.abs(z.values) ** p for z in self)
        return float(np.min(s))


def _periodic_dist(grid: SpaceGrid, center) -> np.ndarray:
    period = 2 * grid.L
    total = 0.0
    for x, c in zip(grid.coords, np.broadcast_to(center, (grid.d,))):
        dx = np.abs(x - c) % period
        total = total + np.minimum(dx, period - dx) ** 2
    return np.sqrt(total) * np.ones(grid.shape)


def _bump(s: np.ndarray) -> np.ndarray:
    out = np.zeros_like(s)
    inside = s < 1
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


def partition_of_unity(grid: SpaceGrid, delta1: float, centers, max_order: int = 2) -> Partition:
    """Normalized bumps ``zeta_k`` supported in ``B(x_k, delta1)``.

    A single centre whose ball covers the whole box gives ``zeta = 1``.
    Raises ``ValueError`` when some node is not covered by any ball.
    """
    centers = np.asarray(centers, dtype=float).reshape(-1, grid.d)
    if not delta1 > 0:
        raise ValueError("delta1 must be positive")
    raw = [_bump(_periodic_dist(grid, c) / delta1) for c in centers]
    total = sum(raw)
    if np.any(total <= 0):
        idx = np.argwhere(total <= 0)[0]
        where = [float(grid.x[i]) for i in idx]
        raise ValueError(f"centres leave the point {where} uncovered at radius {delta1}")
    fields = [Field(grid, r / total) for r in raw]
    sums = {}
    for k in range(1, max_order + 1):
        for sigma in itertools.product(range(k + 1), repeat=grid.d):
            if sum(sigma) != k:
                continue
            acc = sum(np.abs(derivative(z, sigma).values) for z in fields)
            sums[sigma] = float(np.max(acc))
    return Partition(fields, sums)
