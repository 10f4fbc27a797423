"""Discrete fractional calculus on a (possibly graded) time grid.

The Riemann-Liouville integral is discretized by product integration: the
piecewise-linear interpolant of the data is integrated exactly against the
kernel ``(t - s)**(alpha - 1) / Gamma(alpha)``.  Derivatives are built by
applying nodal finite differences first and the product-integration rule
second, which makes the Caputo derivative exact on quadratics.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gamma, gammaln, rgamma

from .mittag_leffler import mittag_leffler  # noqa: F401  (re-export)

__all__ = [
    "GradingWarning",
    "TimeGrid",
    "TimeSeries",
    "caputo_derivative",
    "default_grading",
    "frac_integral",
    "frac_integral_array",
    "mittag_leffler",
    "nodal_derivative",
    "pi_weights",
    "rl_derivative",
]


class GradingWarning(UserWarning):
    """Emitted when finite differences run on a strongly non-uniform mesh."""


def default_grading(alpha: float) -> float:
    """Mesh grading exponent resolving the ``t**alpha`` start-up layer."""
    return min(4.0, max(1.0, 2.0 / alpha))


@dataclass(frozen=True)
class TimeGrid:
    """Nodes ``t_n = T * (n / N) ** grading`` for ``n = 0..N``."""

    T: float
    N: int
    grading: float = 1.0

    def __post_init__(self):
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ValueError(f"final time must be positive, got {self.T}")
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"need at least 2 steps, got N={self.N}")
        if self.grading < 1:
            raise ValueError(f"grading exponent must be >= 1, got {self.grading}")
        object.__setattr__(self, "N", int(self.N))

    @classmethod
    def uniform(cls, T: float, N: int) -> TimeGrid:
        return cls(T, N, 1.0)

    @classmethod
    def graded(cls, T: float, N: int, grading: float) -> TimeGrid:
        return cls(T, N, grading)

    @property
    def nodes(self) -> np.ndarray:
        return _nodes(self.T, self.N, self.grading)

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def is_uniform(self) -> bool:
        return self.grading == 1.0

    def scaled(self, factor: float) -> TimeGrid:
        """Same node family stretched to final time ``factor * T``."""
        return TimeGrid(self.T * factor, self.N, self.grading)


@lru_cache(maxsize=64)
def _nodes(T: float, N: int, grading: float) -> np.ndarray:
    t = T * (np.arange(N + 1) / N) ** grading
    t[-1] = T
    t.setflags(write=False)
    return t


@dataclass
class TimeSeries:
    """Values sampled at every node of a time grid.

    ``values`` has the time axis first; trailing axes (e.g. space) are
    carried along untouched by every operator in this module.

    ``singular`` lists exponents ``sigma`` of non-smooth components
    ``c * t**sigma`` the series is known to contain.  The fractional integral
    uses them to add starting weights, so the quadrature stays accurate on
    outputs of previous fractional operations.  Operators in this module
    propagate the list automatically.
    """

    grid: TimeGrid
    values: np.ndarray = field(repr=False)
    singular: tuple[float, ...] = ()

    def __post_init__(self):
        self.singular = _clean_exponents(self.singular)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape[:1] != (self.grid.N + 1,):
            raise ValueError(
                f"expected {self.grid.N + 1} time samples, got shape {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("time series contains non-finite values")

    @classmethod
    def from_function(cls, grid: TimeGrid, fn) -> TimeSeries:
        return cls(grid, fn(grid.nodes))

    @classmethod
    def _unchecked(cls, grid: TimeGrid, values: np.ndarray, singular=()) -> TimeSeries:
        # used for Riemann-Liouville output, which is legitimately infinite at t = 0
        obj = cls.__new__(cls)
        obj.grid = grid
        obj.values = values
        obj.singular = _clean_exponents(singular)
        return obj

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes


def _pow_diff(b: np.ndarray, a: np.ndarray, p: float) -> np.ndarray:
    """``b**p - a**p`` for ``0 <= a < b`` without cancellation."""
    out = np.empty_like(b)
    pos = a > 0
    out[~pos] = b[~pos] ** p
    ap = a[pos]
    out[pos] = ap**p * np.expm1(p * np.log1p((b[pos] - ap) / ap))
    return out


@lru_cache(maxsize=6)
def _pi_weights_cached(T: float, N: int, grading: float, alpha: float) -> np.ndarray:
    t = _nodes(T, N, grading)
    W = np.zeros((N + 1, N + 1))
    for n in range(1, N + 1):
        tn = t[n]
        b = tn - t[:n]
        a = tn - t[1 : n + 1]
        a[-1] = 0.0
        h = t[1 : n + 1] - t[:n]
        d0 = _pow_diff(b, a, alpha)
        d1 = _pow_diff(b, a, alpha + 1.0)
        # with tau = t_n - s the hat functions on cell j are (tau - a)/h for
        # node j and (b - tau)/h for node j+1; integrate both against tau**(alpha-1)
        near = d1 / (alpha + 1.0) - a * d0 / alpha
        far = b * d0 / alpha - d1 / (alpha + 1.0)
        W[n, :n] += near / h
        W[n, 1 : n + 1] += far / h
    W /= gamma(alpha)
    W.setflags(write=False)
    return W


def pi_weights(grid: TimeGrid, alpha: float) -> np.ndarray:
    """Lower-triangular matrix ``W`` with ``(I^alpha phi)(t_n) ~ sum_k W[n, k] phi_k``.

    Exact whenever ``phi`` is piecewise linear on the grid.  All entries are
    nonnegative.
    """
    if not alpha > 0:
        raise ValueError(f"fractional order must be positive, got {alpha}")
    return _pi_weights_cached(float(grid.T), grid.N, float(grid.grading), float(alpha))


# exponents at or above this are smooth enough for the plain rule
_SINGULAR_CAP = 3.0


def _clean_exponents(exps) -> tuple[float, ...]:
    keep: list[float] = []
    for e in sorted(float(x) for x in exps):
        if not math.isfinite(e) or e <= -1:
            raise ValueError(f"singular exponent must exceed -1, got {e}")
        if e >= _SINGULAR_CAP or abs(e - round(e)) < 1e-9 and round(e) in (0, 1):
            continue  # the linear interpolant already reproduces 1 and t
        if keep and e - keep[-1] < 1e-9:
            continue
        keep.append(e)
    return tuple(keep)


@lru_cache(maxsize=32)
def _starting_weights(
    T: float, N: int, grading: float, alpha: float, exps: tuple[float, ...]
) -> np.ndarray:
    """Corrections on nodes ``1..m`` making the rule exact for ``t**sigma``.

    Exponents are taken in increasing order (the most singular first) and
    dropped once the correction weights would grow beyond ten times the
    scale of the plain rule, since large starting weights amplify rounding
    in the data faster than they remove quadrature error.
    """
    t = _nodes(T, N, grading)
    W = _pi_weights_cached(T, N, grading, alpha)
    limit = 10.0 * W.sum(axis=1).max()
    best = np.zeros((N + 1, 0))
    for m in range(1, len(exps) + 1):
        sub = exps[:m]
        V = np.array([t[1 : m + 1] ** e for e in sub])
        R = np.array(
            [np.exp(gammaln(e + 1) - gammaln(e + 1 + alpha)) * t ** (e + alpha) - W @ t**e for e in sub]
        )
        C = np.linalg.solve(V, R).T
        if not np.all(np.isfinite(C)) or np.abs(C).max() > limit:
            break
        best = C
    best.setflags(write=False)
    return best


def frac_integral_array(
    values: np.ndarray, grid: TimeGrid, alpha: float, singular: tuple[float, ...] = ()
) -> np.ndarray:
    """Product-integration ``I^alpha`` applied along axis 0 of ``values``."""
    values = np.asarray(values, dtype=float)
    W = pi_weights(grid, alpha)
    flat = values.reshape(grid.N + 1, -1)
    out = W @ flat
    exps = _clean_exponents(singular)
    if exps:
        C = _starting_weights(float(grid.T), grid.N, float(grid.grading), float(alpha), exps)
        out += C @ flat[1 : C.shape[1] + 1]
    return out.reshape(values.shape)


def _integral_exponents(singular: tuple[float, ...], alpha: float) -> tuple[float, ...]:
    smooth = tuple(alpha + k for k in range(3))
    return smooth + tuple(e + alpha for e in singular)


def frac_integral(phi: TimeSeries, alpha: float) -> TimeSeries:
    """Riemann-Liouville integral of order ``alpha`` sampled at the grid nodes.

    Known singular components of ``phi`` (``phi.singular``) are integrated
    exactly through starting weights; the rest of the rule is exact for
    piecewise-linear data.
    """
    if not (alpha > 0 and math.isfinite(alpha)):
        raise ValueError(f"fractional order must be positive, got {alpha}")
    out = frac_integral_array(phi.values, phi.grid, alpha, phi.singular)
    return TimeSeries(phi.grid, out, _integral_exponents(phi.singular, alpha))


_STENCIL = 5


@lru_cache(maxsize=16)
def _fd_stencils(T: float, N: int, grading: float) -> tuple[np.ndarray, np.ndarray]:
    """Indices and weights of the 5-point first-derivative stencil at each node."""
    t = _nodes(T, N, grading)
    first = np.clip(np.arange(N + 1) - _STENCIL // 2, 0, N + 1 - _STENCIL)
    idx = first[:, None] + np.arange(_STENCIL)[None, :]
    # local coordinates scaled by the stencil width keep the Vandermonde tame
    scale = t[idx[:, -1]] - t[idx[:, 0]]
    x = (t[idx] - t[:, None]) / scale[:, None]
    V = x[:, None, :] ** np.arange(_STENCIL)[None, :, None]
    rhs = np.zeros((N + 1, _STENCIL))
    rhs[:, 1] = 1.0
    w = np.linalg.solve(V, rhs[..., None])[..., 0] / scale[:, None]
    idx.setflags(write=False)
    w.setflags(write=False)
    return idx, w


def nodal_derivative(values: np.ndarray, grid: TimeGrid) -> np.ndarray:
    """Fourth-order five-point derivative at every node (one-sided near the ends).

    Exact for polynomials of degree four on any grid.
    """
    values = np.asarray(values, dtype=float)
    idx, w = _fd_stencils(float(grid.T), grid.N, float(grid.grading))
    flat = values.reshape(grid.N + 1, -1)
    # differencing against the stencil's first node makes constants map to exact zeros
    local = flat[idx] - flat[idx[:, :1]]
    out = np.einsum("nk,nkc->nc", w, local)
    return out.reshape(values.shape)


def _check_order(alpha: float) -> int:
    if not (0 < alpha < 2):
        raise ValueError(f"derivative order must lie in (0, 2), got {alpha}")
    return math.ceil(alpha)


def _warn_on_grading(grid: TimeGrid, alpha: float) -> None:
    # grading beyond what the t**alpha layer needs only inflates the
    # finite-difference error near t = 0
    if grid.grading > default_grading(alpha) * (1 + 1e-12):
        warnings.warn(
            f"grading exponent {grid.grading} exceeds {default_grading(alpha)} "
            f"recommended for order {alpha}; start-up differences lose accuracy",
            GradingWarning,
            stacklevel=3,
        )


def _taylor_head(phi: TimeSeries, n: int) -> tuple[np.ndarray, list[np.ndarray]]:
    t = phi.t
    v = phi.values
    coeffs = [v[0]]
    if n > 1:
        idx, w = _fd_stencils(float(phi.grid.T), phi.grid.N, float(phi.grid.grading))
        coeffs.append(np.tensordot(w[0], v[idx[0]] - v[0], axes=1))
    shape = (-1,) + (1,) * (v.ndim - 1)
    head = np.zeros_like(v)
    for k, c in enumerate(coeffs):
        head = head + (t**k / math.factorial(k)).reshape(shape) * c
    return head, coeffs


def _derivative_of_headless(psi: np.ndarray, grid: TimeGrid, alpha: float, n: int) -> np.ndarray:
    """``I^{n-alpha}`` of the n-th finite-difference derivative."""
    d = psi
    for _ in range(n):
        d = nodal_derivative(d, grid)
    if n - alpha == 0:
        return d
    return frac_integral_array(d, grid, n - alpha)


def _derivative_exponents(phi: TimeSeries, alpha: float, n: int) -> tuple[float, ...]:
    # the Caputo derivative of a smooth function carries t**(k - alpha), k >= n
    smooth = tuple(k - alpha for k in range(n, n + 3))
    return smooth + tuple(e - alpha for e in phi.singular if e - alpha > -1)


def caputo_derivative(phi: TimeSeries, alpha: float) -> TimeSeries:
    """Caputo derivative of order ``alpha`` in (0, 2).

    The Taylor head ``phi(0) + [alpha > 1] phi'(0) t`` is removed first, so a
    constant input yields exactly zero.  Exact for quadratic ``phi`` on any
    grid; for higher-degree polynomials the error is that of fourth-order
    finite differences.
    """
    n = _check_order(alpha)
    _warn_on_grading(phi.grid, alpha)
    head, _ = _taylor_head(phi, n)
    out = _derivative_of_headless(phi.values - head, phi.grid, alpha, n)
    return TimeSeries(phi.grid, out, _derivative_exponents(phi, alpha, n))


def rl_derivative(phi: TimeSeries, alpha: float) -> TimeSeries:
    """Riemann-Liouville derivative of order ``alpha`` in (0, 2).

    Equals the Caputo derivative plus the singular head terms
    ``phi^(k)(0) t**(k - alpha) / Gamma(k + 1 - alpha)``.  Where such a term
    blows up at ``t = 0`` the returned first sample is ``+-inf``; zero
    coefficients contribute nothing.
    """
    n = _check_order(alpha)
    _warn_on_grading(phi.grid, alpha)
    head, coeffs = _taylor_head(phi, n)
    out = _derivative_of_headless(phi.values - head, phi.grid, alpha, n)
    t = phi.t
    shape = (-1,) + (1,) * (out.ndim - 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        for k, c in enumerate(coeffs):
            c = np.asarray(c, dtype=float)
            p = np.where(t > 0, t ** (k - alpha), np.inf if k < alpha else 0.0)
            term = (p * rgamma(k + 1 - alpha)).reshape(shape) * c
            out = out + np.where(c == 0, 0.0, term)
    return TimeSeries._unchecked(phi.grid, out, _derivative_exponents(phi, alpha, n))
