"""Periodic spatial grids and the field containers built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..frac_calc import TimeGrid

__all__ = ["Field", "SpaceGrid", "SpaceTimeField"]


@dataclass(frozen=True)
class SpaceGrid:
    """Uniform periodic grid on ``[-L, L)**d`` with ``n`` nodes per axis.

    Nodes are ``x_i = -L + i * 2L/n``, so ``x = 0`` is always a node and
    power weights centred there have their singular cell on the lattice.
    """

    d: int
    L: float
    n: int

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"only d = 1, 2 are supported, got {self.d}")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ValueError(f"half-width must be positive, got {self.L}")
        if self.n < 16 or self.n & (self.n - 1):
            raise ValueError(f"n must be a power of two >= 16, got {self.n}")

    @property
    def h(self) -> float:
        return 2 * self.L / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @cached_property
    def x(self) -> np.ndarray:
        """1D node coordinates (shared by every axis)."""
        return -self.L + self.h * np.arange(self.n)

    @cached_property
    def coords(self) -> tuple[np.ndarray, ...]:
        """Broadcastable coordinate arrays, one per axis."""
        if self.d == 1:
            return (self.x,)
        return (self.x[:, None], self.x[None, :])

    def points(self) -> np.ndarray:
        """All nodes as an ``(n**d, d)`` array in row-major order."""
        if self.d == 1:
            return self.x[:, None]
        X, Y = np.meshgrid(self.x, self.x, indexing="ij")
        return np.stack([X.ravel(), Y.ravel()], axis=1)

    @cached_property
    def freqs(self) -> tuple[np.ndarray, ...]:
        """Angular frequencies of the real-FFT layout, broadcastable per axis."""
        k_full = np.fft.fftfreq(self.n, d=1.0 / self.n) * (math.pi / self.L)
        k_half = np.fft.rfftfreq(self.n, d=1.0 / self.n) * (math.pi / self.L)
        if self.d == 1:
            return (k_half,)
        return (k_full[:, None], k_half[None, :])

    @cached_property
    def abs_freq(self) -> np.ndarray:
        return np.sqrt(sum(k**2 for k in self.freqs))

    @property
    def nyquist(self) -> float:
        return (math.pi / self.L) * (self.n // 2)

    def sample(self, fn) -> Field:
        return Field(self, fn(*self.coords) * np.ones(self.shape))

    def refine(self, factor: int = 2) -> SpaceGrid:
        return SpaceGrid(self.d, self.L, self.n * factor)


@dataclass
class Field:
    """Real nodal values on a :class:`SpaceGrid`."""

    grid: SpaceGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            if v.size == self.grid.n**self.grid.d:
                v = v.reshape(self.grid.shape)
            else:
                raise ValueError(f"expected shape {self.grid.shape}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        self.values = v

    def __add__(self, other: Field) -> Field:
        _same(self.grid, other.grid)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: Field) -> Field:
        _same(self.grid, other.grid)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, other) -> Field:
        if isinstance(other, Field):
            _same(self.grid, other.grid)
            return Field(self.grid, self.values * other.values)
        return Field(self.grid, self.values * other)

    __rmul__ = __mul__

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))


def _same(a: SpaceGrid, b: SpaceGrid) -> None:
    if a != b:
        raise ValueError(f"grid mismatch: {a} vs {b}")


@dataclass
class SpaceTimeField:
    """Values ``u(t_n, x_i)``: time axis first, then the spatial axes."""

    tgrid: TimeGrid
    sgrid: SpaceGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        shape = (self.tgrid.N + 1,) + self.sgrid.shape
        if v.shape != shape:
            raise ValueError(f"expected shape {shape}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("space-time field contains non-finite values")
        self.values = v

    @classmethod
    def from_function(cls, tgrid: TimeGrid, sgrid: SpaceGrid, fn) -> SpaceTimeField:
        t = tgrid.nodes.reshape((-1,) + (1,) * sgrid.d)
        coords = tuple(c[None, ...] for c in sgrid.coords)
        shape = (tgrid.N + 1,) + sgrid.shape
        return cls(tgrid, sgrid, np.broadcast_to(fn(t, *coords), shape).copy())

    @classmethod
    def zeros(cls, tgrid: TimeGrid, sgrid: SpaceGrid) -> SpaceTimeField:
        return cls(tgrid, sgrid, np.zeros((tgrid.N + 1,) + sgrid.shape))

    def slice(self, n: int) -> Field:
        return Field(self.sgrid, self.values[n])

    def slices(self):
        for n in range(self.tgrid.N + 1):
            yield self.slice(n)

    def map_slices(self, fn) -> SpaceTimeField:
        return SpaceTimeField(self.tgrid, self.sgrid, np.stack([fn(s).values for s in self.slices()]))

    def __add__(self, other: SpaceTimeField) -> SpaceTimeField:
        self._check(other)
        return SpaceTimeField(self.tgrid, self.sgrid, self.values + other.values)

    def __sub__(self, other: SpaceTimeField) -> SpaceTimeField:
        self._check(other)
        return SpaceTimeField(self.tgrid, self.sgrid, self.values - other.values)

    def __mul__(self, c: float) -> SpaceTimeField:
        return SpaceTimeField(self.tgrid, self.sgrid, self.values * c)

    __rmul__ = __mul__

    def _check(self, other: SpaceTimeField) -> None:
        if self.tgrid != other.tgrid or self.sgrid != other.sgrid:
            raise ValueError("space-time grids differ")
