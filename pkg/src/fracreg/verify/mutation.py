"""Deliberate defects used to show that the suites can fail."""

from __future__ import annotations

from contextlib import contextmanager

from ..spaces import multipliers

__all__ = ["mutated_bessel"]


@contextmanager
def mutated_bessel():
    """Flip the sign of the Bessel-potential order for the duration of the block.

    Every norm built on ``bessel_potential`` then measures ``H^{-gamma}``
    where ``H^gamma`` was asked for.
    """
    original = multipliers.bessel_symbol

    def flipped(xi, gamma):
        return original(xi, -gamma)

    multipliers.bessel_symbol = flipped
    try:
        yield
    finally:
        multipliers.bessel_symbol = original
