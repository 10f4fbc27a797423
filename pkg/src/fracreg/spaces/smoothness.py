"""Hoelder, Lipschitz and Zygmund norms on periodic grids (the B^r scale)."""

from __future__ import annotations

import itertools
import math

import numpy as np

from .grid import Field
from .multipliers import derivative

__all__ = ["holder_seminorm", "kappa_prime", "smoothness_norm", "zygmund_seminorm"]

# exhaustive pair search up to this many nodes per axis in 1D
EXHAUSTIVE_1D = 512
_SAMPLE_2D = 256


def kappa_prime(r: float) -> float:
    """Hoelder increment used for non-integer ``r``; ``r + kappa'`` is never an integer."""
    if r == int(r):
        return 0.0
    k = min(0.1, abs((r + 0.1) - round(r + 0.1))) / 2
    for fallback in (k, 0.05, 0.025):
        s = r + fallback
        if fallback > 0 and abs(s - round(s)) > 1e-12:
            return fallback
    raise AssertionError("unreachable")  # pragma: no cover


def _shifts(grid) -> list[tuple[int, ...]]:
    n = grid.n
    if grid.d == 1:
        if n <= EXHAUSTIVE_1D:
            return [(k,) for k in range(1, n // 2 + 1)]
        near = range(1, 65)
        far = np.unique(np.geomspace(65, n // 2, 64).astype(int))
        return [(int(k),) for k in itertools.chain(near, far)]
    small = [(i, j) for i in range(-4, 5) for j in range(0, 5) if (i, j) > (0, 0) or (j > 0)]
    rng = np.random.default_rng(0)
    # stratify by shift length: one draw per dyadic shell and direction bucket
    extra = set()
    shells = int(math.log2(n // 2))
    per = max(1, _SAMPLE_2D // max(shells, 1))
    for s in range(2, shells + 1):
        lo, hi = 2 ** (s - 1), 2**s
        for _ in range(per):
            rad = rng.uniform(lo, hi)
            ang = rng.uniform(0, math.pi)
            i, j = int(round(rad * math.cos(ang))), int(round(rad * math.sin(ang)))
            if (i, j) != (0, 0):
                extra.add((i, j))
    return small + sorted(extra)


def _periodic_len(k: tuple[int, ...], grid) -> float:
    n = grid.n
    return grid.h * math.sqrt(sum(min(abs(c) % n, n - abs(c) % n) ** 2 for c in k))


def holder_seminorm(f: Field, theta: float) -> float:
    """``sup |f(x + y) - f(x)| / |y|^theta`` over grid shifts (``theta = 1``: Lipschitz)."""
    best = 0.0
    v = f.values
    axes = tuple(range(f.grid.d))
    for k in _shifts(f.grid):
        dist = _periodic_len(k, f.grid)
        if dist == 0:
            continue
        diff = np.abs(np.roll(v, tuple(-c for c in k), axis=axes) - v).max()
        best = max(best, diff / dist**theta)
    return float(best)


def zygmund_seminorm(f: Field, theta: float) -> float:
    """``sup |f(x + 2y) - 2 f(x + y) + f(x)| / |y|^theta`` over grid shifts."""
    best = 0.0
    v = f.values
    axes = tuple(range(f.grid.d))
    for k in _shifts(f.grid):
        dist = _periodic_len(k, f.grid)
        if dist == 0:
            continue
        one = np.roll(v, tuple(-c for c in k), axis=axes)
        two = np.roll(v, tuple(-2 * c for c in k), axis=axes)
        best = max(best, np.abs(two - 2 * one + v).max() / dist**theta)
    return float(best)


def _multi_indices(d: int, order: int):
    return [b for b in itertools.product(range(order + 1), repeat=d) if sum(b) == order]


def _sup_part(a: Field, top: int) -> tuple[float, dict]:
    total = 0.0
    ders = {}
    for k in range(top + 1):
        for b in _multi_indices(a.grid.d, k):
            ders[b] = derivative(a, b) if k else a
            total += ders[b].sup()
    return total, ders


def smoothness_norm(a: Field, r: float, variant: str = "holder") -> float:
    """Norm of ``a`` in ``B^r``.

    ``r = 0``: sup norm.  Integer ``r``: ``C^{r-1,1}`` (sups of derivatives
    through order ``r - 1`` plus the Lipschitz seminorms of order ``r - 1``).
    Otherwise the Hoelder norm of order ``r + kappa'``.  ``variant="zygmund"``
    returns the Zygmund norm of order ``r`` built on second differences.
    Derivatives are spectral; seminorms are maxima over grid shifts.
    """
    if r < 0:
        raise ValueError(f"smoothness order must be nonnegative, got {r}")
    if variant not in ("holder", "zygmund"):
        raise ValueError(f"unknown variant {variant!r}")
    if r == 0:
        return a.sup()
    if variant == "zygmund":
        low = math.ceil(r) - 1
        frac = r - low
        total, ders = _sup_part(a, low)
        return total + sum(zygmund_seminorm(ders[b], frac) for b in _multi_indices(a.grid.d, low))
    if r == int(r):
        k = int(r) - 1
        total, ders = _sup_part(a, k)
        return total + sum(holder_seminorm(ders[b], 1.0) for b in _multi_indices(a.grid.d, k))
    s = r + kappa_prime(r)
    m = math.floor(s)
    total, ders = _sup_part(a, m)
    return total + sum(holder_seminorm(ders[b], s - m) for b in _multi_indices(a.grid.d, m))
