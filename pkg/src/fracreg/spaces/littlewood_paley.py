"""Smooth dyadic (Littlewood-Paley) decomposition on periodic grids."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..weights import Weight
from .grid import Field
from .multipliers import apply_multiplier
from .norms import weighted_lp_norm

__all__ = ["LPDecomposition", "eta", "lp_decompose", "lp_square_function_norm", "psi_hat"]


def _rho(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


def eta(s):
    """Smooth cutoff: 1 on ``[0, 1]``, 0 on ``[2, inf)``."""
    a = _rho(2.0 - np.asarray(s, dtype=float))
    b = _rho(np.asarray(s, dtype=float) - 1.0)
    return a / (a + b)


def psi_hat(s):
    """Dyadic bump ``eta(s) - eta(2 s)``, supported in ``1/2 < s < 2``."""
    return eta(s) - eta(2.0 * np.asarray(s, dtype=float))


@dataclass
class LPDecomposition:
    """Pieces ``Psi_j * u`` for ``j = 0..J``; piece 0 is the low-frequency lump."""

    pieces: list[Field]

    @property
    def J(self) -> int:
        return len(self.pieces) - 1

    def reconstruct(self) -> Field:
        out = np.zeros_like(self.pieces[0].values)
        for f in self.pieces:
            out = out + f.values
        return Field(self.pieces[0].grid, out)


def lp_decompose(u: Field) -> LPDecomposition:
    """Split ``u`` into smooth dyadic frequency annuli.

    ``J`` is the smallest level whose cutoff ``eta(2^-J |xi|)`` equals one on
    every grid frequency, so the pieces sum back to ``u`` exactly.
    """
    g = u.grid
    top = math.sqrt(g.d) * g.nyquist
    J = max(1, math.ceil(math.log2(top)))
    pieces = [apply_multiplier(lambda xi: eta(np.sqrt(sum(k**2 for k in xi))), u)]
    for j in range(1, J + 1):
        scale = 2.0**-j
        pieces.append(apply_multiplier(lambda xi, s=scale: psi_hat(s * np.sqrt(sum(k**2 for k in xi))), u))
    return LPDecomposition(pieces)


def lp_square_function_norm(dec: LPDecomposition, gamma: float, p: float, w: Weight) -> float:
    """``||Psi_0 * u||_{L_p(w)} + || (sum_{j>=1} |2^{gamma j} Psi_j * u|^2)^{1/2} ||_{L_p(w)}``."""
    low = weighted_lp_norm(dec.pieces[0], p, w)
    sq = np.zeros_like(dec.pieces[0].values)
    for j, f in enumerate(dec.pieces[1:], start=1):
        sq += (2.0 ** (gamma * j) * f.values) ** 2
    high = weighted_lp_norm(Field(dec.pieces[0].grid, np.sqrt(sq)), p, w)
    return low + high
