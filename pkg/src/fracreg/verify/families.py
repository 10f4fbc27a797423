"""Seeded test families used to probe inequalities.

Every family is a pure function of the grid and the seed, so two runs with
the same arguments produce bitwise-identical samples.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gamma as gamma_fn

from ..frac_calc import TimeGrid
from ..spaces.grid import Field, SpaceGrid, SpaceTimeField

__all__ = [
    "bump",
    "spatial_family",
    "spacetime_family",
    "time_family",
    "tindep_forcing",
]

N_TRIG = 30
N_BUMP = 5
N_SMOOTH = 5


def bump(x: np.ndarray, center: float, width: float, L: float) -> np.ndarray:
    """``exp(-1 / (1 - s^2))`` on periodic distance ``s = |x - center| / width``."""
    d = np.abs((x - center + L) % (2 * L) - L)
    s = d / width
    out = np.zeros_like(s)
    m = s < 1
    out[m] = np.exp(-1.0 / (1.0 - s[m] ** 2))
    return out


def _trig(grid: SpaceGrid, rng: np.random.Generator) -> np.ndarray:
    kmax = grid.n // 4
    vals = np.zeros(grid.shape)
    for _ in range(6):
        k = rng.integers(0, kmax + 1, size=grid.d)
        phase = rng.uniform(0.0, 2 * math.pi)
        arg = sum(kk * (math.pi / grid.L) * c for kk, c in zip(k, grid.coords)) + phase
        vals = vals + rng.standard_normal() * np.cos(arg)
    return vals


_SMOOTH = (
    lambda x: np.sin(x),
    lambda x: np.exp(np.cos(x)) - 1.0,
    lambda x: np.sin(2 * x) + 0.5 * np.cos(3 * x),
    lambda x: np.exp(np.sin(x)) * np.cos(x),
    lambda x: 1.0 / (1.25 + np.cos(x)),
)


def spatial_family(grid: SpaceGrid, seed: int) -> list[tuple[str, Field]]:
    """30 random trigonometric polynomials, 5 bumps, 5 smooth profiles.

    Trigonometric frequencies reach a quarter of the grid size and bump
    widths are multiples of the mesh width, so the family sharpens with the
    grid; this is what lets refinement expose unbounded constants.  Two
    bumps sit at the origin, where power weights are singular.
    """
    rng = np.random.default_rng([seed, grid.d, grid.n])
    out = []
    for i in range(N_TRIG):
        out.append((f"trig{i:02d}", Field(grid, _trig(grid, rng))))
    centers = (0.0, 0.0, 0.7, -1.3, 2.0)
    widths = (4, 16, 8, 24, 48)
    for i, (c, w) in enumerate(zip(centers, widths)):
        vals = np.ones(grid.shape)
        for x in grid.coords:
            vals = vals * bump(x, c * grid.L / math.pi, w * grid.h, grid.L)
        out.append((f"bump{i}", Field(grid, vals)))
    for i, fn in enumerate(_SMOOTH[:N_SMOOTH]):
        scale = math.pi / grid.L
        vals = np.ones(grid.shape)
        for x in grid.coords:
            vals = vals * fn(scale * x)
        out.append((f"smooth{i}", Field(grid, vals)))
    return out


def time_family(t: np.ndarray, T: float, seed: int) -> list[tuple[str, np.ndarray]]:
    """Functions of ``s = t / T``: a dilation-invariant family on ``(0, T)``."""
    s = t / T
    rng = np.random.default_rng([seed, 7])
    out = [
        ("one", np.ones_like(s)),
        ("s", s),
        ("s2", s**2),
        ("sin", np.sin(math.pi * s)),
        ("bump", bump(s, 0.5, 0.3, 10.0)),
        ("decay", np.exp(-5 * s)),
        ("osc", np.cos(12 * math.pi * s)),
    ]
    for i in range(3):
        c = rng.standard_normal(4)
        out.append((f"cubic{i}", c[0] + c[1] * s + c[2] * s**2 + c[3] * s**3))
    return out


def spacetime_family(tgrid: TimeGrid, sgrid: SpaceGrid, alpha: float, seed: int):
    """Forcings for the solver-based checks, one spatial dimension."""
    T = tgrid.T
    rng = np.random.default_rng([seed, 11])
    k = int(rng.integers(1, 8))
    c = gamma_fn(3.0) / gamma_fn(3.0 - alpha)

    def trig_t(t, x):
        return np.cos(k * x + 0.3) * np.sin(math.pi * t / T) + 0.3 * np.cos(2 * x) * (t / T)

    forcings = [
        ("bump", lambda t, x: np.exp(-(((x - 0.5) / 0.5) ** 2)) * np.exp(-(((t - T / 2) / (T / 4)) ** 2))),
        ("cos3", lambda t, x: np.cos(3 * x) * (1 + t / T)),
        ("manufactured", lambda t, x: (c * t ** (2 - alpha) + t**2) * np.sin(x)),
        ("trig", trig_t),
    ]
    return [(name, SpaceTimeField.from_function(tgrid, sgrid, fn)) for name, fn in forcings]


def tindep_forcing(tgrid: TimeGrid, sgrid: SpaceGrid) -> SpaceTimeField:
    """``cos(8x) exp(-x^2)``, constant in time."""
    return SpaceTimeField.from_function(
        tgrid, sgrid, lambda t, x: np.cos(8 * x) * np.exp(-(x**2)) + 0 * t
    )
