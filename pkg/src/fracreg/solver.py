"""Time-fractional parabolic equations with zero initial data.

Solves ``d^alpha_t u = a^{ij} u_{x^i x^j} + b^i u_{x^i} + c u + f`` on a
periodic box through the Volterra form ``u = I^alpha (L u + f)``.  Time is
discretized with the product-integration weights of :mod:`fracreg.frac_calc`,
space spectrally.  :func:`solve_dense_oracle` is an independent brute-force
implementation of the same scheme, kept as ground truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Union

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.special import gamma as gamma_fn

from .frac_calc import TimeGrid, TimeSeries, caputo_derivative, nodal_derivative, pi_weights
from .spaces.grid import Field, SpaceGrid, SpaceTimeField
from .spaces.io import write_space_time

__all__ = [
    "EquationSpec",
    "PowerSeparable",
    "SolveOptions",
    "Solution",
    "SolverError",
    "apply_operator",
    "manufactured_rhs",
    "parabolic_rescale",
    "rescale_spec",
    "solve",
    "solve_dense_oracle",
    "stable_steps",
]

Coef = Union[float, SpaceTimeField]

DENSE_CAP = 200_000


class SolverError(RuntimeError):
    """Raised when the newest-slice iteration fails to converge."""


def _coef_array(c: Coef, tgrid: TimeGrid, sgrid: SpaceGrid) -> np.ndarray | float:
    if isinstance(c, SpaceTimeField):
        if c.tgrid != tgrid or c.sgrid != sgrid:
            raise ValueError("coefficient field lives on different grids than the equation")
        return c.values
    c = float(c)
    if not math.isfinite(c):
        raise ValueError("coefficients must be finite")
    return c


def _is_const(c: Coef) -> bool:
    return not isinstance(c, SpaceTimeField)


@dataclass
class EquationSpec:
    """Coefficients, forcing and grids of one equation.

    ``a`` is a ``d x d`` nested sequence, ``b`` a length-``d`` sequence; every
    entry (and ``c``) is a float or a :class:`SpaceTimeField` on the
    equation's grids.  ``f`` may be left ``None`` when the equation only
    describes an operator (see :func:`manufactured_rhs`).
    """

    alpha: float
    tgrid: TimeGrid
    sgrid: SpaceGrid
    a: tuple
    b: tuple = None
    c: Coef = 0.0
    f: SpaceTimeField | None = None
    delta: float = 0.5

    def __post_init__(self):
        d = self.sgrid.d
        if not (0 < self.alpha < 2) or self.alpha == 1:
            raise ValueError(f"alpha must lie in (0, 1) or (1, 2), got {self.alpha}")
        if not (0 < self.delta < 1):
            raise ValueError("ellipticity constant must lie in (0, 1)")
        if self.b is None:
            self.b = (0.0,) * d
        self.a = tuple(tuple(row) for row in self.a)
        self.b = tuple(self.b)
        if len(self.a) != d or any(len(row) != d for row in self.a) or len(self.b) != d:
            raise ValueError(f"coefficient shapes do not match dimension {d}")
        if self.f is not None and (self.f.tgrid != self.tgrid or self.f.sgrid != self.sgrid):
            raise ValueError("forcing lives on different grids than the equation")
        self._check_symmetry()
        self._check_ellipticity()

    @classmethod
    def laplacian(cls, alpha, f: SpaceTimeField, diffusivity: float = 1.0, delta: float = 0.5):
        """``d^alpha u = diffusivity * Laplacian u + f``."""
        d = f.sgrid.d
        a = [[diffusivity if i == j else 0.0 for j in range(d)] for i in range(d)]
        return cls(alpha, f.tgrid, f.sgrid, a, f=f, delta=delta)

    def with_forcing(self, f: SpaceTimeField) -> EquationSpec:
        return replace(self, f=f)

    @property
    def constant(self) -> bool:
        coefs = [x for row in self.a for x in row] + list(self.b) + [self.c]
        return all(_is_const(x) for x in coefs)

    def coef(self, c: Coef):
        return _coef_array(c, self.tgrid, self.sgrid)

    def _check_symmetry(self):
        d = self.sgrid.d
        for i in range(d):
            for j in range(i + 1, d):
                aij, aji = self.coef(self.a[i][j]), self.coef(self.a[j][i])
                if not np.array_equal(np.asarray(aij), np.asarray(aji)):
                    raise ValueError(f"a[{i}][{j}] differs from a[{j}][{i}]")

    def _check_ellipticity(self):
        # eigenvalues of the symmetric matrix bound a^{ij} xi_i xi_j over every xi
        d = self.sgrid.d
        shape = (self.tgrid.N + 1,) + self.sgrid.shape
        A = np.empty(shape + (d, d))
        for i in range(d):
            for j in range(d):
                A[..., i, j] = self.coef(self.a[i][j])
        ev = np.linalg.eigvalsh(A)
        lo, hi = ev.min(), ev.max()
        if lo < self.delta * (1 - 1e-12) or hi > (1 + 1e-12) / self.delta:
            raise ValueError(
                f"ellipticity violated: eigenvalues in [{lo:.6g}, {hi:.6g}], "
                f"need [{self.delta:.6g}, {1 / self.delta:.6g}]"
            )


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-10
    max_iter: int = 300


@dataclass
class Solution:
    """Computed solution with its a posteriori certificate.

    ``residual`` is the relative Volterra residual
    ``max |u - I^alpha_h (L u + f)| / max(|u|, |I^alpha_h f|)`` recomputed
    from the full weight matrix after the march.
    """

    u: SpaceTimeField
    scheme: str
    residual: float
    iterations: tuple[int, ...] = ()
    spec: EquationSpec = field(default=None, repr=False)

    def caputo_residual(self) -> float:
        """``max |d^alpha u - (L u + f)|`` with finite-difference Caputo derivatives.

        Contains the time discretization error, so it is informative rather
        than a convergence certificate.
        """
        s = self.spec
        du = caputo_derivative(TimeSeries(s.tgrid, self.u.values), s.alpha).values
        rhs = apply_operator(s, self.u.values) + s.f.values
        return float(np.abs(du - rhs).max())

    def write(self, path) -> None:
        write_space_time(
            path,
            self.u,
            {"alpha": self.spec.alpha, "scheme": self.scheme, "residual": self.residual},
        )


class _SpectralOps:
    """Frequency arrays for nodal spectral differentiation on one grid."""

    def __init__(self, sgrid: SpaceGrid):
        self.grid = sgrid
        self.axes = tuple(range(1, sgrid.d + 1))
        xi = sgrid.freqs
        odd = [np.where(np.isclose(np.abs(k), sgrid.nyquist), 0.0, k) for k in xi]
        d = sgrid.d
        self.second = [[None] * d for _ in range(d)]
        for i in range(d):
            for j in range(d):
                self.second[i][j] = -(xi[i] ** 2) if i == j else -(odd[i] * odd[j])
        self.first = [1j * k for k in odd]

    def symbol(self, a, b, c) -> np.ndarray:
        d = self.grid.d
        out = np.zeros(self.grid.abs_freq.shape, dtype=complex)
        for i in range(d):
            for j in range(d):
                out = out + a[i][j] * self.second[i][j]
            out = out + b[i] * self.first[i]
        return out + c

    def fft(self, v):
        return np.fft.rfftn(v, axes=self.axes)

    def ifft(self, v):
        return np.fft.irfftn(v, s=self.grid.shape, axes=self.axes)


def _at(c, n):
    return c if np.isscalar(c) else c[n]


def apply_operator(spec: EquationSpec, values: np.ndarray) -> np.ndarray:
    """``L u`` at every time node; ``values`` has shape ``(N + 1, *space)``."""
    ops = _SpectralOps(spec.sgrid)
    U = ops.fft(values)
    d = spec.sgrid.d
    out = spec.coef(spec.c) * values
    for i in range(d):
        for j in range(d):
            out = out + spec.coef(spec.a[i][j]) * ops.ifft(U * ops.second[i][j])
        out = out + spec.coef(spec.b[i]) * ops.ifft(U * ops.first[i])
    return out


def _slice_operator(spec, ops, n):
    """Closure applying ``L(t_n)`` to one nodal slice."""
    a = [[_at(spec.coef(x), n) for x in row] for row in spec.a]
    b = [_at(spec.coef(x), n) for x in spec.b]
    c = _at(spec.coef(spec.c), n)
    d = spec.sgrid.d
    axes = tuple(range(d))
    second = ops.second

    def L(v):
        V = np.fft.rfftn(v, axes=axes)
        out = c * v
        for i in range(d):
            for j in range(d):
                out = out + a[i][j] * np.fft.irfftn(V * second[i][j], s=v.shape, axes=axes)
            out = out + b[i] * np.fft.irfftn(V * ops.first[i], s=v.shape, axes=axes)
        return out

    return L, a, b, c


def _midrange(x):
    return x if np.isscalar(x) else 0.5 * (float(np.max(x)) + float(np.min(x)))


def _envelope_symbol(spec, ops) -> np.ndarray:
    """Symbol with every coefficient at its largest magnitude: the stiffest slice."""

    def top(c):
        v = spec.coef(c)
        return float(v) if np.isscalar(v) else float(np.abs(v).max())

    return ops.symbol([[top(x) for x in row] for row in spec.a], [top(x) for x in spec.b], 0.0)


def _check_step(wnn: float, sym: np.ndarray, n: int) -> None:
    growth = wnn * float(np.max(sym.real))
    if growth >= 0.5:
        raise ValueError(
            f"time step too coarse at slice {n}: implicit factor has contraction margin {1 - growth:.3g}"
        )


def _scalar_recursion(W: np.ndarray, lam: np.ndarray) -> float:
    """Largest ``|v|`` for ``v = 1 + lam I^alpha v`` discretized with ``W``."""
    N = W.shape[0] - 1
    V = np.zeros((N + 1, lam.size), dtype=complex)
    V[0] = 1.0
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, N + 1):
            V[n] = (1.0 + W[n, :n] @ (lam * V[:n])) / (1.0 - W[n, n] * lam)
    peak = float(np.abs(V).max())
    return peak if np.isfinite(peak) else math.inf


def _stiff_sample(sym: np.ndarray, m: int = 12) -> np.ndarray:
    ell = np.ravel(sym)
    ell = ell[ell.real < 0]
    if ell.size == 0:
        return ell
    ell = ell[np.argsort(np.abs(ell))]
    idx = np.unique(np.geomspace(1, ell.size, m).astype(int) - 1)
    return ell[idx]


# The exact scalar solution E_alpha(lam t^alpha) stays bounded by one for
# Re lam < 0; an unstable discrete recursion grows geometrically instead.
STABILITY_BOUND = 4.0


def _check_stability(W: np.ndarray, sym: np.ndarray, alpha: float) -> None:
    lam = _stiff_sample(sym)
    if lam.size == 0 or _scalar_recursion(W, lam) <= STABILITY_BOUND:
        return
    big = float(np.abs(lam).max())
    h = (2.0 * math.gamma(alpha + 2) / big) ** (1.0 / alpha)
    raise ValueError(
        f"time step too coarse: the implicit recursion is unstable for modes with |symbol| = {big:.4g} "
        f"at alpha = {alpha}; steps of about {h:.3g} or smaller are needed"
    )


def stable_steps(alpha: float, T: float, grading: float, stiffness: float, start: int = 8) -> int:
    """Smallest step count (from ``start``, growing by 5/4) whose weights are stable.

    ``stiffness`` is the largest ``|symbol|`` of the spatial operator.  For
    ``alpha <= 1`` every step count passes; for ``alpha > 1`` the
    piecewise-linear rule is stable only when ``W_nn * stiffness`` stays
    below a threshold of order one.
    """
    lam = -np.geomspace(min(1.0, stiffness), stiffness, 12)
    N = int(start)
    while True:
        W = pi_weights(TimeGrid(T, N, grading), alpha)
        if _scalar_recursion(W, lam) <= STABILITY_BOUND:
            return N
        N = max(N + 1, int(math.ceil(1.25 * N)))


def _require_forcing(spec: EquationSpec) -> SpaceTimeField:
    if spec.f is None:
        raise ValueError("equation has no forcing term")
    return spec.f


def solve(spec: EquationSpec, options: SolveOptions = SolveOptions()) -> Solution:
    """March ``u(t_n) = [I^alpha (L u + f)](t_n)``, implicit in the newest slice.

    Constant coefficients are solved exactly mode by mode.  Variable
    coefficients use a fixed-point iteration preconditioned by the
    constant-coefficient operator frozen at the midrange of the current
    slice's coefficients.

    :raises SolverError: when a slice fails to reach ``options.tol``.
    """
    f = _require_forcing(spec)
    tg, sg = spec.tgrid, spec.sgrid
    W = pi_weights(tg, spec.alpha)
    ops = _SpectralOps(sg)
    N = tg.N
    iters = [0] * (N + 1)
    if spec.constant:
        sym = ops.symbol(
            [[float(x) for x in row] for row in spec.a], [float(x) for x in spec.b], float(spec.c)
        )
        F = ops.fft(f.values).reshape(N + 1, -1)
        ell = sym.ravel()
        _check_stability(W, sym, spec.alpha)
        U = np.zeros_like(F)
        G = np.zeros_like(F)
        G[0] = F[0]
        for n in range(1, N + 1):
            wnn = W[n, n]
            _check_step(wnn, sym, n)
            hist = W[n, :n] @ G[:n]
            U[n] = (hist + wnn * F[n]) / (1.0 - wnn * ell)
            G[n] = ell * U[n] + F[n]
            iters[n] = 1
        u = ops.ifft(U.reshape((N + 1,) + sym.shape))
        scheme = "volterra-pi/spectral-constant"
    else:
        fv = f.values.reshape(N + 1, -1)
        u = np.zeros_like(f.values)
        G = np.zeros_like(fv)
        G[0] = fv[0]
        axes = tuple(range(sg.d))
        _check_stability(W, _envelope_symbol(spec, ops), spec.alpha)
        for n in range(1, N + 1):
            wnn = W[n, n]
            L, a, b, c = _slice_operator(spec, ops, n)
            sym0 = ops.symbol([[_midrange(x) for x in row] for row in a], [_midrange(x) for x in b], _midrange(c))
            _check_step(wnn, sym0, n)
            P = 1.0 - wnn * sym0
            rhs = (W[n, :n] @ G[:n] + wnn * fv[n]).reshape(sg.shape)
            scale = max(float(np.abs(rhs).max()), 1e-300)
            v = np.fft.irfftn(np.fft.rfftn(rhs, axes=axes) / P, s=sg.shape, axes=axes)
            for k in range(1, options.max_iter + 1):
                r = rhs - (v - wnn * L(v))
                if float(np.abs(r).max()) <= options.tol * scale:
                    break
                v = v + np.fft.irfftn(np.fft.rfftn(r, axes=axes) / P, s=sg.shape, axes=axes)
            else:
                raise SolverError(
                    f"slice {n} (t = {tg.nodes[n]:.6g}) did not converge in {options.max_iter} iterations"
                )
            iters[n] = k
            u[n] = v
            G[n] = (L(v) + f.values[n]).ravel()
        scheme = "volterra-pi/spectral-frozen-fixed-point"
    residual = _volterra_residual(spec, u, W)
    return Solution(SpaceTimeField(tg, sg, u), scheme, residual, tuple(iters), spec)


def _volterra_residual(spec: EquationSpec, u: np.ndarray, W: np.ndarray) -> float:
    N = spec.tgrid.N
    g = apply_operator(spec, u) + spec.f.values
    res = u.reshape(N + 1, -1) - W @ g.reshape(N + 1, -1)
    scale = max(float(np.abs(u).max()), float(np.abs(W @ spec.f.values.reshape(N + 1, -1)).max()))
    if scale == 0:
        return 0.0
    return float(np.abs(res).max() / scale)


# ---------------------------------------------------------------------------
# brute-force oracle


def _truncated_power_weights(t: np.ndarray, alpha: float) -> np.ndarray:
    """Product-integration weights from the truncated-power form of hat functions.

    A hat function is a combination of ramps ``(s - c)_+``, and
    ``I^alpha (s - c)_+ = (t - c)_+^(alpha + 1) / Gamma(alpha + 2)``.
    """
    N = len(t) - 1
    h = np.diff(t)
    W = np.zeros((N + 1, N + 1))
    g2 = gamma_fn(alpha + 2.0)
    g1 = gamma_fn(alpha + 1.0)
    for n in range(1, N + 1):
        R = np.maximum(t[n] - t[: n + 1], 0.0) ** (alpha + 1.0) / g2
        # node 0: 1 - s / h0 + (s - t1)_+ / h0
        W[n, 0] = t[n] ** alpha / g1 - R[0] / h[0] + R[1] / h[0]
        for k in range(1, n + 1):
            val = R[k - 1] / h[k - 1] - R[k] * (1.0 / h[k - 1])
            if k < n:
                val += -R[k] / h[k] + R[k + 1] / h[k]
            W[n, k] = val
    return W


def _fourier_diff_matrices(n: int, L: float) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form periodic spectral first and second derivative matrices."""
    h = 2.0 * math.pi / n
    j = np.arange(n)
    diff = (j[:, None] - j[None, :]) % n
    D1 = np.zeros((n, n))
    D2 = np.zeros((n, n))
    off = diff != 0
    sgn = np.where(diff % 2 == 0, 1.0, -1.0)
    D1[off] = 0.5 * sgn[off] / np.tan(diff[off] * h / 2.0)
    D2[off] = -0.5 * sgn[off] / np.sin(diff[off] * h / 2.0) ** 2
    D2[~off] = -(math.pi**2) / (3.0 * h**2) - 1.0 / 6.0
    s = math.pi / L
    return D1 * s, D2 * s * s


def _dense_operator(spec: EquationSpec, n: int, mats) -> np.ndarray:
    d = spec.sgrid.d
    m = spec.sgrid.n
    D1, D2 = mats
    Id = np.eye(m)
    if d == 1:
        first = [D1]
        second = [[D2]]
    else:
        first = [np.kron(D1, Id), np.kron(Id, D1)]
        second = [
            [np.kron(D2, Id), np.kron(D1, D1)],
            [np.kron(D1, D1), np.kron(Id, D2)],
        ]
    size = m**d
    A = np.zeros((size, size))
    for i in range(d):
        for j in range(d):
            coef = np.ravel(_at(spec.coef(spec.a[i][j]), n)) * np.ones(size)
            A += coef[:, None] * second[i][j]
        coef = np.ravel(_at(spec.coef(spec.b[i]), n)) * np.ones(size)
        A += coef[:, None] * first[i]
    A += np.diag(np.ravel(_at(spec.coef(spec.c), n)) * np.ones(size))
    return A


def solve_dense_oracle(spec: EquationSpec) -> Solution:
    """Direct solve of the full space-time collocation system.

    The system is block lower triangular in time, so it is solved exactly by
    forward block substitution with dense LU factorizations of each diagonal
    block.  Uses its own weight assembly and differentiation matrices.

    :raises ValueError: if ``(N + 1) * n**d`` exceeds 200000.
    """
    f = _require_forcing(spec)
    tg, sg = spec.tgrid, spec.sgrid
    size = sg.n**sg.d
    if (tg.N + 1) * size > DENSE_CAP:
        raise ValueError(f"{(tg.N + 1) * size} unknowns exceed the dense oracle cap of {DENSE_CAP}")
    W = _truncated_power_weights(tg.nodes, spec.alpha)
    mats = _fourier_diff_matrices(sg.n, sg.L)
    N = tg.N
    fv = f.values.reshape(N + 1, size)
    U = np.zeros((N + 1, size))
    G = np.zeros((N + 1, size))
    const = spec.constant
    A0 = _dense_operator(spec, 0, mats) if const else None
    G[0] = fv[0] + (A0 if const else _dense_operator(spec, 0, mats)) @ U[0]
    cache = {}
    I = np.eye(size)
    for n in range(1, N + 1):
        A = A0 if const else _dense_operator(spec, n, mats)
        wnn = W[n, n]
        key = wnn if const else None
        if key is None or key not in cache:
            lu = lu_factor(I - wnn * A)
            if key is not None:
                cache[key] = lu
        else:
            lu = cache[key]
        rhs = W[n, :n] @ G[:n] + wnn * fv[n]
        U[n] = lu_solve(lu, rhs)
        G[n] = A @ U[n] + fv[n]
    u = U.reshape((N + 1,) + sg.shape)
    res = U - W @ G
    scale = max(float(np.abs(U).max()), float(np.abs(W @ fv).max()))
    residual = float(np.abs(res).max() / scale) if scale else 0.0
    return Solution(SpaceTimeField(tg, sg, u), "dense-block-oracle", residual, spec=spec)


# ---------------------------------------------------------------------------
# manufactured solutions


@dataclass(frozen=True)
class PowerSeparable:
    """``u(t, x) = sum_i t**beta_i * g_i(x)``."""

    terms: tuple[tuple[float, Field], ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((float(b), g) for b, g in self.terms))
        if not self.terms:
            raise ValueError("need at least one term")
        grids = {g.grid for _, g in self.terms}
        if len(grids) != 1:
            raise ValueError("all spatial profiles must share one grid")

    @property
    def sgrid(self) -> SpaceGrid:
        return self.terms[0][1].grid

    def on(self, tgrid: TimeGrid) -> SpaceTimeField:
        t = tgrid.nodes.reshape((-1,) + (1,) * self.sgrid.d)
        vals = sum(t**b * g.values[None, ...] for b, g in self.terms)
        return SpaceTimeField(tgrid, self.sgrid, vals)

    def caputo(self, alpha: float, tgrid: TimeGrid) -> SpaceTimeField:
        t = tgrid.nodes.reshape((-1,) + (1,) * self.sgrid.d)
        vals = np.zeros((tgrid.N + 1,) + self.sgrid.shape)
        for b, g in self.terms:
            vals = vals + gamma_fn(b + 1) / gamma_fn(b + 1 - alpha) * t ** (b - alpha) * g.values
        return SpaceTimeField(tgrid, self.sgrid, vals)


_REFINE = 8


def manufactured_rhs(
    u_exact: PowerSeparable | SpaceTimeField | Callable, spec: EquationSpec
) -> SpaceTimeField:
    """Forcing ``f = d^alpha u - L u`` that makes ``u_exact`` the solution.

    ``u_exact`` may be a :class:`PowerSeparable` (closed-form Caputo
    derivative), a callable ``u(t, *x)`` (Caputo derivative on an
    eight-times finer time grid) or sampled values.

    :raises ValueError: if ``u_exact`` violates the zero initial conditions,
        or the closed form is unbounded at ``t = 0``.
    """
    tg, sg, alpha = spec.tgrid, spec.sgrid, spec.alpha
    if isinstance(u_exact, PowerSeparable):
        if u_exact.sgrid != sg:
            raise ValueError("manufactured solution lives on a different spatial grid")
        for b, g in u_exact.terms:
            if not np.any(g.values):
                continue
            if b <= 0:
                raise ValueError(f"term t**{b} does not vanish at t = 0")
            if alpha > 1 and b <= 1:
                raise ValueError(f"term t**{b} has nonzero initial slope, not allowed for alpha > 1")
            if b < alpha:
                raise ValueError(f"term t**{b} has an unbounded order-{alpha} derivative at t = 0")
        U = u_exact.on(tg)
        Du = u_exact.caputo(alpha, tg).values
    else:
        if isinstance(u_exact, SpaceTimeField):
            U = u_exact
            fine_vals, fine = U.values, tg
            step = 1
        else:
            U = SpaceTimeField.from_function(tg, sg, u_exact)
            fine = TimeGrid(tg.T, tg.N * _REFINE, tg.grading)
            fine_vals = SpaceTimeField.from_function(fine, sg, u_exact).values
            step = _REFINE
        scale = max(float(np.abs(fine_vals).max()), 1.0)
        if float(np.abs(fine_vals[0]).max()) > 1e-12 * scale:
            raise ValueError("manufactured solution must vanish at t = 0")
        if alpha > 1:
            s0 = float(np.abs(nodal_derivative(fine_vals, fine)[0]).max())
            if s0 > 1e-6 * scale / fine.T:
                raise ValueError("manufactured solution must have zero initial slope for alpha > 1")
        Du = caputo_derivative(TimeSeries(fine, fine_vals), alpha).values[::step]
    f = Du - apply_operator(spec, U.values)
    return SpaceTimeField(tg, sg, f)


# ---------------------------------------------------------------------------
# parabolic scaling


def _dyadic_exponent(r: float) -> int:
    if not r > 0:
        raise ValueError(f"scale factor must be positive, got {r}")
    m = -math.log2(r)
    mi = round(m)
    if mi < 0 or abs(m - mi) > 1e-12 or 2.0 ** (-mi) != r:
        raise ValueError(f"scale factor {r} is not of the form 2**-m")
    return mi


def parabolic_rescale(F: SpaceTimeField, r: float, alpha: float, power: float) -> SpaceTimeField:
    """``r**power * F(r**(2/alpha) t, r x)`` by relabelling nodes.

    The output grids are ``T / r**(2/alpha)`` and ``L / r`` with the same
    node counts, so every rescaled node is an original node.
    """
    _dyadic_exponent(r)
    if r == 1:
        return SpaceTimeField(F.tgrid, F.sgrid, F.values.copy())
    tg = TimeGrid(F.tgrid.T * r ** (-2.0 / alpha), F.tgrid.N, F.tgrid.grading)
    sg = SpaceGrid(F.sgrid.d, F.sgrid.L / r, F.sgrid.n)
    return SpaceTimeField(tg, sg, F.values * r**power)


def rescale_spec(spec: EquationSpec, r: float) -> EquationSpec:
    """The equation satisfied by ``u_r(t, x) = u(r**(2/alpha) t, r x)``."""
    alpha = spec.alpha
    f = parabolic_rescale(_require_forcing(spec), r, alpha, 2.0)

    def coef(c, power):
        if _is_const(c):
            return float(c) * r**power
        return parabolic_rescale(c, r, alpha, power)

    a = [[coef(x, 0.0) for x in row] for row in spec.a]
    b = [coef(x, 1.0) for x in spec.b]
    return EquationSpec(alpha, f.tgrid, f.sgrid, a, b, coef(spec.c, 2.0), f, spec.delta)
