"""Muckenhoupt weights on a box or a time interval.

A :class:`Weight` is one of three kinds:

* ``constant`` -- ``w = coef``;
* ``power`` -- ``w(x) = coef * |x - center| ** exponent``;
* ``tabulated`` -- piecewise-linear interpolation of positive samples (1D).

Averages over balls use exact antiderivatives wherever possible.  Power
weights whose exponent is not locally integrable (``<= -d``) are regularized
as ``max(|x - center|, eps) ** exponent`` with ``eps`` tied to the finest
ball in the family, so the growth of the characteristic under refinement
exposes non-membership.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.integrate import quad
from scipy.signal import fftconvolve

__all__ = [
    "ApEstimate",
    "BallFamily",
    "Weight",
    "ap_constant",
    "ball_family",
    "cell_integrals",
    "combine",
    "dual_weight",
    "interval_integral",
    "load_tabulated",
    "parse_weight",
    "weight_eval",
]

KINDS = ("constant", "power", "tabulated")


@dataclass(frozen=True)
class Weight:
    """A positive weight on ``[lo, hi]**dim``.

    Spatial weights live on the box ``[-L, L]**dim``; temporal weights on
    ``[0, T]`` with ``dim = 1``.  Tabulated weights store coordinates and
    samples as tuples so the object stays hashable (norm caches key on it).
    """

    kind: str
    dim: int = 1
    lo: float = -math.pi
    hi: float = math.pi
    exponent: float = 0.0
    center: tuple[float, ...] = (0.0,)
    coef: float = 1.0
    nodes: tuple[float, ...] = field(default=(), repr=False)
    samples: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.dim not in (1, 2):
            raise ValueError(f"weights are defined for d = 1, 2, got {self.dim}")
        if not self.hi > self.lo:
            raise ValueError("empty weight domain")
        if not (self.coef > 0 and math.isfinite(self.coef)):
            raise ValueError("weight coefficient must be positive")
        if len(self.center) != self.dim:
            object.__setattr__(self, "center", tuple(float(c) for c in self.center) * self.dim
                               if len(self.center) == 1 else tuple(self.center))
            if len(self.center) != self.dim:
                raise ValueError("center dimension does not match weight dimension")
        if self.kind == "tabulated":
            if self.dim != 1:
                raise ValueError("tabulated weights are one-dimensional")
            x = np.asarray(self.nodes, dtype=float)
            v = np.asarray(self.samples, dtype=float)
            if x.ndim != 1 or x.shape != v.shape or x.size < 2:
                raise ValueError("tabulated weight needs matching coordinate/sample columns")
            if np.any(np.diff(x) <= 0):
                raise ValueError("tabulated coordinates must increase strictly")
            if not np.all(v > 0) or not np.all(np.isfinite(v)):
                raise ValueError("tabulated samples must be positive and finite")
            if x[0] > self.lo + 1e-12 * (self.hi - self.lo) or x[-1] < self.hi - 1e-12 * (self.hi - self.lo):
                raise ValueError("tabulated weight must cover its domain")

    # constructors -------------------------------------------------------
    @classmethod
    def constant(cls, dim: int = 1, L: float = math.pi, value: float = 1.0) -> Weight:
        return cls("constant", dim, -L, L, coef=value)

    @classmethod
    def power(cls, exponent: float, dim: int = 1, L: float = math.pi, center=0.0, coef: float = 1.0) -> Weight:
        c = tuple(np.broadcast_to(np.asarray(center, dtype=float), (dim,)).tolist())
        if exponent == 0:
            return cls("constant", dim, -L, L, coef=coef, center=c)
        return cls("power", dim, -L, L, exponent=float(exponent), center=c, coef=coef)

    @classmethod
    def temporal_power(cls, exponent: float, T: float, coef: float = 1.0) -> Weight:
        if exponent == 0:
            return cls("constant", 1, 0.0, T, coef=coef)
        return cls("power", 1, 0.0, T, exponent=float(exponent), center=(0.0,), coef=coef)

    @classmethod
    def tabulated(cls, x, values, lo: float | None = None, hi: float | None = None) -> Weight:
        x = tuple(float(v) for v in x)
        v = tuple(float(s) for s in values)
        return cls("tabulated", 1, x[0] if lo is None else lo, x[-1] if hi is None else hi, nodes=x, samples=v)

    # helpers ------------------------------------------------------------
    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    @property
    def label(self) -> str:
        if self.kind == "constant":
            return "1" if self.coef == 1 else f"const:{self.coef:g}"
        if self.kind == "power":
            c = "" if not any(self.center) else "@" + ",".join(f"{v:g}" for v in self.center)
            k = "" if self.coef == 1 else f"*{self.coef:g}"
            return f"power:{self.exponent:g}{c}{k}"
        return f"table[{len(self.nodes)}]"

    def on_domain(self, lo: float, hi: float) -> Weight:
        """Same weight formula on another domain."""
        return replace(self, lo=lo, hi=hi)

    def __call__(self, x) -> np.ndarray:
        """Pointwise values (``inf`` or ``0`` at a power singularity)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            shape = x.shape[:-1] if self.dim > 1 else x.shape
            return np.full(shape, self.coef)
        if self.kind == "power":
            r = _distance(x, self.center, self.dim)
            with np.errstate(divide="ignore"):
                return self.coef * r**self.exponent
        return np.interp(x, self.nodes, self.samples)


def _distance(x: np.ndarray, center, dim: int) -> np.ndarray:
    if dim == 1:
        return np.abs(x - center[0])
    return np.hypot(x[..., 0] - center[0], x[..., 1] - center[1])


def parse_weight(spec: str, dim: int = 1, L: float = math.pi, temporal_T: float | None = None) -> Weight:
    """Parse ``"1"``, ``"const:c"``, ``"power:lam[@y]"`` or ``"table:path"``."""
    spec = spec.strip()
    lo, hi = (0.0, temporal_T) if temporal_T is not None else (-L, L)
    if spec in ("", "1", "const", "constant"):
        return Weight("constant", 1 if temporal_T is not None else dim, lo, hi)
    kind, _, arg = spec.partition(":")
    if kind == "const":
        return Weight("constant", dim, lo, hi, coef=float(arg))
    if kind == "power":
        lam, _, ctr = arg.partition("@")
        try:
            lam_v = float(lam)
        except ValueError:
            raise ValueError(f"bad weight exponent in {spec!r}") from None
        if temporal_T is not None:
            if ctr:
                raise ValueError("temporal power weights are centred at t = 0")
            return Weight.temporal_power(lam_v, temporal_T)
        center = [float(c) for c in ctr.split(",")] if ctr else [0.0]
        return Weight.power(lam_v, dim, L, center if len(center) == dim else center * dim)
    if kind == "table":
        w = load_tabulated(arg)
        return w.on_domain(lo, hi)
    raise ValueError(f"unrecognized weight spec {spec!r}")


def load_tabulated(path) -> Weight:
    """Read a two-column (coordinate, value) text file."""
    data = np.loadtxt(Path(path), ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns, got {data.shape[1]}")
    return Weight.tabulated(data[:, 0], data[:, 1])


def weight_eval(w: Weight, x, resolution: float | None = None) -> float:
    """Value of ``w`` at a point of its domain.

    At the centre of a power weight the value is taken at the nearest
    quadrature node, half a cell (``resolution / 2``) away; the default cell
    is ``(hi - lo) / 1024``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (w.dim,):
        raise ValueError(f"expected a point in {w.dim} dimensions")
    tol = 1e-12 * (w.hi - w.lo)
    if np.any(x < w.lo - tol) or np.any(x > w.hi + tol):
        raise ValueError(f"point {x.tolist()} lies outside the domain [{w.lo}, {w.hi}]^{w.dim}")
    if w.kind == "constant":
        return float(w.coef)
    if w.kind == "tabulated":
        return float(np.interp(x[0], w.nodes, w.samples))
    r = float(_distance(x if w.dim == 1 else x[None, :], w.center, w.dim).ravel()[0])
    if r == 0.0:
        h = (w.hi - w.lo) / 1024 if resolution is None else resolution
        r = h / 2
    return float(w.coef * r**w.exponent)


def dual_weight(w: Weight, p: float) -> tuple[Weight, float]:
    """``(w ** (-1/(p-1)), p/(p-1))``."""
    if not p > 1:
        raise ValueError(f"exponent p must exceed 1, got {p}")
    s = -1.0 / (p - 1.0)
    pp = p / (p - 1.0)
    if w.kind == "constant":
        return replace(w, coef=w.coef**s), pp
    if w.kind == "power":
        return replace(w, exponent=w.exponent * s, coef=w.coef**s), pp
    return replace(w, samples=tuple(np.asarray(w.samples) ** s)), pp


def combine(w0: Weight, a0: float, w1: Weight, a1: float) -> Weight:
    """The weight ``w0**a0 * w1**a1`` for constant/power weights sharing a centre."""
    kinds = {w0.kind, w1.kind}
    if "tabulated" in kinds:
        x = np.union1d(w0.nodes or [w0.lo, w0.hi], w1.nodes or [w1.lo, w1.hi])
        return Weight.tabulated(x, w0(x) ** a0 * w1(x) ** a1, w0.lo, w0.hi)
    if w0.kind == "power" and w1.kind == "power" and w0.center != w1.center:
        raise ValueError("power weights with different centres do not combine to a power weight")
    center = w0.center if w0.kind == "power" else w1.center
    lam = a0 * (w0.exponent if w0.kind == "power" else 0.0) + a1 * (w1.exponent if w1.kind == "power" else 0.0)
    coef = w0.coef**a0 * w1.coef**a1
    if lam == 0:
        return Weight("constant", w0.dim, w0.lo, w0.hi, coef=coef, center=center)
    return Weight("power", w0.dim, w0.lo, w0.hi, exponent=lam, center=center, coef=coef)


# ---------------------------------------------------------------------------
# exact 1D integrals


def _power_antiderivative(u: np.ndarray, mu: float, eps: float) -> np.ndarray:
    """Antiderivative of ``max(|u|, eps) ** mu`` vanishing at ``u = 0``."""
    au = np.abs(u)
    sgn = np.sign(u)
    if eps == 0.0:
        if mu <= -1:
            raise ValueError(f"|x|^{mu} is not locally integrable; supply a regularization")
        return sgn * au ** (mu + 1.0) / (mu + 1.0)
    inner = eps**mu * u
    big = au > eps
    with np.errstate(divide="ignore", invalid="ignore"):
        if mu == -1.0:
            tail = sgn * (1.0 + np.log(au / eps))
        else:
            tail = sgn * eps ** (mu + 1.0) * (1.0 + np.expm1((mu + 1.0) * np.log(au / eps)) / (mu + 1.0))
    return np.where(big, tail, inner)


def _tab_antiderivative(x: np.ndarray, nodes: np.ndarray, vals: np.ndarray) -> np.ndarray:
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (vals[1:] + vals[:-1]) * np.diff(nodes))])
    x = np.clip(x, nodes[0], nodes[-1])
    k = np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, len(nodes) - 2)
    dx = x - nodes[k]
    h = nodes[k + 1] - nodes[k]
    slope = (vals[k + 1] - vals[k]) / h
    return cum[k] + vals[k] * dx + 0.5 * slope * dx**2


def interval_integral(w: Weight, a, b, power: float = 1.0, eps: float = 0.0) -> np.ndarray:
    """``int_a^b w(x)**power dx`` for a 1D weight, exactly (vectorized in a, b).

    Power weights use the closed-form antiderivative, regularized at scale
    ``eps`` when the effective exponent is not integrable.  Tabulated
    weights integrate the piecewise-linear interpolant of ``samples**power``.
    """
    if w.dim != 1:
        raise ValueError("interval_integral is one-dimensional")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if w.kind == "constant":
        return w.coef**power * (b - a)
    if w.kind == "power":
        mu = w.exponent * power
        y = w.center[0]
        e = eps if mu <= -1 else 0.0
        return w.coef**power * (_power_antiderivative(b - y, mu, e) - _power_antiderivative(a - y, mu, e))
    nodes = np.asarray(w.nodes)
    vals = np.asarray(w.samples) ** power
    return _tab_antiderivative(b, nodes, vals) - _tab_antiderivative(a, nodes, vals)


# ---------------------------------------------------------------------------
# 2D cell integrals

_GL_POINTS = 6


@lru_cache(maxsize=64)
def _corner_square_integral(mu: float, eps_over_h: float) -> float:
    """``int_{[0,1]^2} max(|x|, e)**mu dx`` by a polar split (exact up to 1D quadrature)."""
    e = eps_over_h

    def radial(theta):
        R = 1.0 / math.cos(theta)
        lo = min(e, R)
        inner = e**mu * lo**2 / 2 if e > 0 else 0.0
        if R <= e:
            return inner
        if mu == -2.0:
            return inner + math.log(R / lo)
        return inner + (R ** (mu + 2) - lo ** (mu + 2)) / (mu + 2)

    val, _ = quad(radial, 0.0, math.pi / 4, epsabs=1e-14, epsrel=1e-12, limit=200)
    return 2.0 * val


def _cell_integrals_2d(w: Weight, edges: np.ndarray, power: float, eps: float) -> np.ndarray:
    h = edges[1] - edges[0]
    mids = 0.5 * (edges[1:] + edges[:-1])
    n = mids.size
    if w.kind == "constant":
        return np.full((n, n), w.coef**power * h * h)
    gx, gw = np.polynomial.legendre.leggauss(_GL_POINTS)
    pts = (mids[:, None] + 0.5 * h * gx[None, :]).ravel()  # (n*G,)
    X, Y = np.meshgrid(pts, pts, indexing="ij")
    mu = w.exponent * power
    r = np.hypot(X - w.center[0], Y - w.center[1])
    e = eps if mu <= -2 else 0.0
    with np.errstate(divide="ignore"):
        f = w.coef**power * np.maximum(r, e) ** mu
    wts = np.outer(np.tile(gw, n), np.tile(gw, n)) * (h / 2) ** 2
    cells = (f * wts).reshape(n, _GL_POINTS, n, _GL_POINTS).sum(axis=(1, 3))
    # cells touching the singular point get the exact polar value
    cx = (np.asarray(w.center) - edges[0]) / h
    on_node = np.all(np.abs(cx - np.round(cx)) < 1e-9)
    exact = w.coef**power * h ** (mu + 2) * _corner_square_integral(mu, e / h)
    if on_node:
        i, j = (int(round(c)) for c in cx)
        for di in (-1, 0):
            for dj in (-1, 0):
                if 0 <= i + di < n and 0 <= j + dj < n:
                    cells[i + di, j + dj] = exact
    else:
        i, j = (int(math.floor(c)) for c in cx)
        if 0 <= i < n and 0 <= j < n:
            # split the cell at the singular point into four corner rectangles
            tot = 0.0
            for sx in (cx[0] - i, i + 1 - cx[0]):
                for sy in (cx[1] - j, j + 1 - cx[1]):
                    tot += _rect_corner_integral(mu, sx * h, sy * h, e)
            cells[i, j] = w.coef**power * tot
    return cells


def _rect_corner_integral(mu: float, a: float, b: float, eps: float) -> float:
    """``int_{[0,a]x[0,b]} max(|x|, eps)**mu dx``."""
    if a <= 0 or b <= 0:
        return 0.0

    def inner(x):
        f = lambda y: max(math.hypot(x, y), eps) ** mu
        return quad(f, 0.0, b, epsabs=1e-15, limit=100)[0]

    return quad(inner, 0.0, a, epsabs=1e-15, limit=100)[0]


def cell_integrals(w: Weight, n: int, L: float, power: float = 1.0, eps: float = 0.0) -> np.ndarray:
    """Integrals of ``w**power`` over the periodic cells centred at grid nodes.

    Grid nodes are ``x_i = -L + i * 2L/n``; the cell of node ``i`` is
    ``[x_i - h/2, x_i + h/2]`` (wrapped periodically for ``i = 0``), so the
    cells tile the box exactly.
    """
    h = 2 * L / n
    if w.dim == 1:
        x = -L + h * np.arange(n)
        a = x - h / 2
        b = x + h / 2
        out = interval_integral(w, np.maximum(a, -L), b, power, eps)
        # wrap the left half-cell of node 0 to the right end of the box
        out[0] += interval_integral(w, np.array(L - h / 2), np.array(L), power, eps)
        return out
    return _fold_periodic(w, n, L, power, eps)


def _fold_periodic(w: Weight, n: int, L: float, power: float, eps: float) -> np.ndarray:
    # integrate on the 2n x 2n half-cell lattice inside the box, then gather
    h = 2 * L / n
    edges = -L + (h / 2) * np.arange(2 * n + 1)
    half = _cell_integrals_2d(w, edges, power, eps)  # (2n, 2n) half cells
    # half cell k covers [-L + k h/2, -L + (k+1) h/2]; node i owns half cells 2i-1, 2i
    idx = (np.arange(2 * n) + 1) // 2 % n
    out = np.zeros((n, n))
    np.add.at(out, (idx[:, None], idx[None, :]), half)
    return out


# ---------------------------------------------------------------------------
# Muckenhoupt characteristic


@dataclass(frozen=True)
class BallFamily:
    """Dyadic balls ``B(c, L * 2**-m)`` for ``m = 0..M`` around lattice centres."""

    L: float
    M: int
    dim: int = 1
    lo: float | None = None
    hi: float | None = None
    extra_centers: tuple[tuple[float, ...], ...] = ()
    centers_per_radius: int = 2

    def __post_init__(self):
        if self.M < 4:
            raise ValueError(f"ball family needs M >= 4 refinement levels, got {self.M}")

    @property
    def radii(self) -> np.ndarray:
        return self.L * 2.0 ** -np.arange(self.M + 1)

    def domain(self) -> tuple[float, float]:
        lo = -self.L if self.lo is None else self.lo
        hi = self.L if self.hi is None else self.hi
        return lo, hi

    def spacing(self, level: int) -> float:
        return self.L * 2.0**-level / self.centers_per_radius

    def centers(self, level: int) -> np.ndarray:
        lo, hi = self.domain()
        s = self.spacing(level)
        k = np.arange(math.ceil((hi - lo) / s - 1e-9) + 1)
        grid1 = np.minimum(lo + s * k, hi)
        if self.dim == 1:
            c = grid1[:, None]
        else:
            X, Y = np.meshgrid(grid1, grid1, indexing="ij")
            c = np.stack([X.ravel(), Y.ravel()], axis=1)
        if self.extra_centers:
            c = np.concatenate([c, np.asarray(self.extra_centers, dtype=float).reshape(-1, self.dim)])
        return c

    def quadrature_step(self, level: int | None = None) -> float:
        """Resolution with eight nodes per diameter of the smallest ball."""
        m = self.M if level is None else level
        return 2 * self.L * 2.0**-m / 8


def ball_family(w: Weight, M: int = 10) -> BallFamily:
    """Default family for ``w``: lattice centres plus the weight's singular centre."""
    L = 0.5 * (w.hi - w.lo)
    extra = (tuple(w.center),) if w.kind == "power" else ()
    return BallFamily(L, M, w.dim, w.lo, w.hi, extra)


@dataclass
class ApEstimate:
    p: float
    value: float
    argmax_ball: tuple[tuple[float, ...], float]
    refinement_trend: list[float]
    diverging: bool
    warnings: list[str] = field(default_factory=list)

    @property
    def bounded(self) -> bool:
        return not self.diverging


def _trend_diverges(trend: list[float]) -> bool:
    if len(trend) < 3:
        return False
    v0, v1, v2 = trend[-3:]
    if v2 >= 2.0 * v1:
        return True
    d1, d2 = v1 - v0, v2 - v1
    # logarithmic blow-up adds a constant amount per dyadic level
    return d2 > 0 and d2 >= 0.5 * d1 and d2 >= 0.01 * v2


def _level_value_1d(w: Weight, p: float, fam: BallFamily, level: int):
    lo, hi = fam.domain()
    c = fam.centers(level)[:, 0]
    r = fam.radii[: level + 1]
    eps = fam.quadrature_step(level) / 2
    a = np.maximum(c[:, None] - r[None, :], lo)
    b = np.minimum(c[:, None] + r[None, :], hi)
    size = b - a
    s = -1.0 / (p - 1.0)
    avg_w = interval_integral(w, a, b, 1.0, eps) / size
    avg_d = interval_integral(w, a, b, s, eps) / size
    prod = avg_w * avg_d ** (p - 1.0)
    k = np.unravel_index(np.argmax(prod), prod.shape)
    return float(prod[k]), ((float(c[k[0]]),), float(r[k[1]]))


def _level_value_2d(w: Weight, p: float, fam: BallFamily, level: int):
    lo, hi = fam.domain()
    h = fam.quadrature_step(level)
    n = int(round((hi - lo) / h))
    edges = lo + h * np.arange(n + 1)
    eps = h / 2
    s = -1.0 / (p - 1.0)
    cw = _cell_integrals_2d(w, edges, 1.0, eps)
    cd = _cell_integrals_2d(w, edges, s, eps)
    ones = np.ones((n, n))
    best, arg = -np.inf, None
    stride = max(1, int(round(fam.spacing(level) / h)))
    for R in fam.radii[: level + 1]:
        m = int(math.ceil(R / h))
        off = np.arange(-m, m) + 0.5
        mask = (off[:, None] ** 2 + off[None, :] ** 2) * h * h <= R * R
        # full convolution: entry (i + m, j + m) collects cells around node (i, j)
        sw = fftconvolve(cw, mask[::-1, ::-1], mode="full")
        sd = fftconvolve(cd, mask[::-1, ::-1], mode="full")
        cnt = fftconvolve(ones, mask[::-1, ::-1], mode="full")
        sl = slice(m, m + n + 1, stride)
        sw, sd, cnt = sw[sl, sl], sd[sl, sl], np.rint(cnt[sl, sl])
        ok = cnt > 0.5
        area = np.where(ok, cnt, 1.0) * h * h
        prod = np.where(ok, (sw / area) * np.maximum(sd / area, 0) ** (p - 1.0), 0.0)
        k = np.unravel_index(np.argmax(prod), prod.shape)
        if prod[k] > best:
            best = float(prod[k])
            arg = ((float(lo + k[0] * stride * h), float(lo + k[1] * stride * h)), float(R))
    return best, arg


def ap_constant(
    w: Weight, p: float, balls: BallFamily | None = None, min_level: int | None = None
) -> ApEstimate:
    """Estimate ``[w]_p = sup_B (avg_B w)(avg_B w**(-1/(p-1)))**(p-1)``.

    The supremum is taken over the ball family truncated at each level
    ``min_level..M`` (default: the last seven levels, at least level 1);
    the resulting sequence is the refinement trend and the
    estimate is its last entry.  Growth by 2x over the last level, or an
    increment that fails to decay (the logarithmic case), is reported as
    divergence.
    """
    if not p > 1:
        raise ValueError(f"A_p needs p > 1, got {p}")
    fam = ball_family(w) if balls is None else balls
    if fam.dim != w.dim:
        raise ValueError("ball family and weight dimensions differ")
    if min_level is None:
        min_level = max(1, fam.M - 6)
    notes: list[str] = []
    if w.kind == "tabulated":
        spacing = float(np.min(np.diff(w.nodes)))
        if spacing > fam.quadrature_step():
            msg = (
                f"tabulated spacing {spacing:g} is coarser than {fam.quadrature_step():g} "
                "(8 nodes per smallest ball diameter); averages on small balls are under-resolved"
            )
            notes.append(msg)
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
    if w.kind == "constant":
        c = tuple(0.5 * (w.lo + w.hi) for _ in range(w.dim))
        trend = [1.0] * (fam.M - min_level + 1)
        return ApEstimate(p, 1.0, (c, float(fam.L)), trend, False, notes)
    level_fn = _level_value_1d if w.dim == 1 else _level_value_2d
    trend: list[float] = []
    best, arg = -np.inf, None
    for level in range(min(min_level, fam.M), fam.M + 1):
        v, a = level_fn(w, p, fam, level)
        if v > best:
            best, arg = v, a
        trend.append(max(best, 1.0))
    return ApEstimate(p, trend[-1], arg, trend, _trend_diverges(trend), notes)
