"""Acceptance criteria, one test each.

Every test prints a single ``[criterion k] PASS|FAIL`` line with the measured
quantities, then asserts the same condition, runtime limit included.
"""

import math
import time

import numpy as np
from scipy.special import gamma

from fracreg.frac_calc import (
    TimeGrid,
    TimeSeries,
    caputo_derivative,
    default_grading,
    frac_integral,
    mittag_leffler,
)
from fracreg.solver import EquationSpec, PowerSeparable, manufactured_rhs, solve, solve_dense_oracle
from fracreg.spaces import Field, SpaceGrid, SpaceTimeField
from fracreg.spaces.multipliers import bessel_potential
from fracreg.spaces.norms import sobolev_norm
from fracreg.verify import CheckSpec, TolerancePolicy, mutated_bessel, run_check, run_suite
from fracreg.weights import parse_weight

PI = math.pi
SPACES = (("2", "1"), ("2", "power:0.5"), ("3", "1"))


def report(capsys, k: int, ok: bool, detail: str, elapsed: float, limit: float) -> bool:
    ok = ok and elapsed < limit
    with capsys.disabled():
        print(f"\n[criterion {k}] {'PASS' if ok else 'FAIL'} {detail} ({elapsed:.1f} s, limit {limit:g} s)")
    return ok


def worst(result, side=None):
    return max(c for pr in result.results for s in pr.series if side in (None, s.side) for c in s.constants)


def test_criterion_1_identities(capsys):
    t0 = time.perf_counter()
    spec = CheckSpec(
        "frac-identities",
        [{"alpha": a} for a in (0.3, 0.5, 0.7, 1.2, 1.5, 1.8)],
        (512, 1024),
        TolerancePolicy(cap=1e-6, floor=1e-9),
    )
    r = run_check(spec)
    at_1024 = max(row.ratio for row in r.rows if row.level == 1024)
    # informational: a cubic term is outside the exactness class of the rule
    g = TimeGrid.uniform(1.0, 1024)
    phi = TimeSeries(g, g.nodes**3)
    cubic = max(
        float(np.abs(frac_integral(frac_integral(phi, 0.5), a).values - frac_integral(phi, a + 0.5).values).max()
              / np.abs(frac_integral(phi, a + 0.5).values).max())
        for a in (0.3, 1.8)
    )
    ok = report(
        capsys, 1, r.passed and at_1024 <= 1e-6,
        f"max relative error at N=1024 {at_1024:.3g} (degree <= 2 family); t^3 semigroup error {cubic:.3g} for reference",
        time.perf_counter() - t0, 10,
    )
    assert ok


def test_criterion_2_caputo_closed_forms(capsys):
    t0 = time.perf_counter()
    g = TimeGrid.uniform(1.0, 1024)
    t = g.nodes[1:-1]
    d1 = caputo_derivative(TimeSeries(g, g.nodes), 0.5).values[1:-1]
    e1 = float(np.max(np.abs(d1 - 2 * np.sqrt(t / PI)) / (2 * np.sqrt(t / PI))))
    d2 = caputo_derivative(TimeSeries(g, g.nodes**2), 1.5).values[1:-1]
    ref = 2 / gamma(1.5) * np.sqrt(t)
    e2 = float(np.max(np.abs(d2 - ref) / ref))
    ok = report(capsys, 2, max(e1, e2) <= 1e-5, f"relative errors {e1:.3g}, {e2:.3g}", time.perf_counter() - t0, 5)
    assert ok


def test_criterion_3_ap_boundary(capsys):
    t0 = time.perf_counter()
    cases = [(lam, "bounded") for lam in (-0.9, 0.0, 0.5, 0.9)] + [(lam, "diverging") for lam in (-1.0, 1.0, 2.0)]
    params = [{"weight": "1" if lam == 0 else f"power:{lam}", "expect": e} for lam, e in cases]
    r = run_check(CheckSpec("ap-membership", params, (8, 10, 12)))
    verdicts = ", ".join(f"{lam:g}:{pr.verdict}" for (lam, _), pr in zip(cases, r.results))
    ok = report(capsys, 3, r.passed, verdicts, time.perf_counter() - t0, 30)
    assert ok


def test_criterion_4_bessel_exactness(capsys):
    t0 = time.perf_counter()
    g = SpaceGrid(1, PI, 256)
    rng = np.random.default_rng(4)
    coef = rng.standard_normal(40)
    u = Field(g, sum(c * np.cos(k * g.x + 0.3 * k) for k, c in enumerate(coef, start=1)))
    errs = {}
    a = bessel_potential(bessel_potential(u, 1.3), -0.6).values
    b = bessel_potential(u, 0.7).values
    errs["composition"] = float(np.abs(a - b).max() / np.abs(b).max())
    # action on the Fourier coefficient of the mode, over the whole range
    worst_eig = 0.0
    for k in (1, 5, 17, 60, 127):
        for gam in (-2.0, -0.5, 1.0, 2.0):
            v = Field(g, np.sin(k * g.x))
            ratio = np.fft.rfft(bessel_potential(v, gam).values)[k] / np.fft.rfft(v.values)[k]
            m = (1 + k**2) ** (gam / 2)
            worst_eig = max(worst_eig, abs(ratio - m) / m)
    errs["eigen"] = worst_eig
    # nodal values for the documented examples: sin(3x) with gamma 2, sin(kx) with gamma 1
    nodal = 0.0
    for k, gam in [(3, 2.0)] + [(k, 1.0) for k in (1, 5, 17, 60, 127)]:
        v = Field(g, np.sin(k * g.x))
        ref = (1 + k**2) ** (gam / 2) * v.values
        nodal = max(nodal, float(np.abs(bessel_potential(v, gam).values - ref).max() / np.abs(ref).max()))
    errs["eigen-nodal"] = nodal
    # informational: nodal comparison against rounded samples at the extreme of the range
    v = Field(g, np.sin(127 * g.x))
    ref = (1 + 127**2) ** -1 * v.values
    floor = float(np.abs(bessel_potential(v, -2.0).values - ref).max() / np.abs(ref).max())
    w = parse_weight("power:0.5")
    lhs = sobolev_norm(bessel_potential(u, 0.8), 0.4, 2.0, w)
    rhs = sobolev_norm(u, 1.2, 2.0, w)
    errs["isometry"] = abs(lhs - rhs) / rhs
    ok = report(
        capsys, 4, max(errs.values()) <= 1e-12,
        ", ".join(f"{k} {v:.3g}" for k, v in errs.items()) + f"; sample-rounding floor at k=127, gamma=-2: {floor:.3g}",
        time.perf_counter() - t0, 5,
    )
    assert ok


def test_criterion_5_littlewood_paley(capsys):
    t0 = time.perf_counter()
    params = [{"p": float(p), "w1": w, "gamma": g} for p, w in SPACES for g in (0.0, 1.0, -1.0)]
    r = run_check(CheckSpec("lp-equivalence", params, (128, 256, 512)))
    growth = max(s.growth for pr in r.results for s in pr.series)
    detail = f"upper <= {worst(r, 'upper'):.3g}, lower <= {worst(r, 'lower'):.3g}, max drift {growth:.3f}"
    ok = report(capsys, 5, r.passed and growth <= 1.25, detail, time.perf_counter() - t0, 120)
    assert ok


def test_criterion_6_spatial_inequalities(capsys):
    t0 = time.perf_counter()
    levels = (128, 256, 512)
    specs = [
        CheckSpec(
            "interpolation",
            [{"p": float(p), "w1": w, "gamma0": -1.0, "gamma1": 1.0, "theta": th} for p, w in SPACES for th in (0.25, 0.5, 0.75)],
            levels,
        ),
        CheckSpec("multiplier", [{"p": float(p), "w1": w, "gamma": g} for p, w in SPACES for g in (0.0, 1.0, -1.0, 0.5)], levels),
        CheckSpec("localization", [{"p": float(p), "w1": w, "gamma": g} for p, w in SPACES for g in (0.0, 1.0, -1.0)], levels),
    ]
    results = [run_check(s) for s in specs]
    growth = {r.check_id: max(s.growth for pr in r.results for s in pr.series) for r in results}
    ok = all(r.passed for r in results) and max(growth.values()) <= 1.25
    detail = ", ".join(f"{k} drift {v:.3f}" for k, v in growth.items())
    ok = report(capsys, 6, ok, detail, time.perf_counter() - t0, 180)
    assert ok


def test_criterion_7_solver(capsys):
    t0 = time.perf_counter()
    sg = SpaceGrid(1, PI, 64)
    exact = PowerSeparable(((2.0, sg.sample(np.sin)),))
    errs = []
    for N in (64, 128, 256, 512):
        tg = TimeGrid(1.0, N)
        spec = EquationSpec(0.5, tg, sg, [[1.0]])
        u = solve(spec.with_forcing(manufactured_rhs(exact, spec))).u.values
        errs.append(float(np.abs(u - exact.on(tg).values).max()))
    monotone = all(b < a for a, b in zip(errs, errs[1:]))

    oracle = 0.0
    for alpha in (0.3, 0.5, 1.5):
        for variable in (False, True):
            tg, g = TimeGrid(1.0, 32), SpaceGrid(1, PI, 32)
            a = SpaceTimeField.from_function(tg, g, lambda t, x: 1 + 0.4 * np.sin(x) * np.cos(t)) if variable else 1.0
            f = SpaceTimeField.from_function(tg, g, lambda t, x: np.exp(-(((x - 0.5) / 0.4) ** 2)) * t * (1 - t / 2))
            spec = EquationSpec(alpha, tg, g, [[a]], b=[0.3], c=-0.2, f=f)
            u, v = solve(spec).u.values, solve_dense_oracle(spec).u.values
            oracle = max(oracle, float(np.abs(u - v).max() / np.abs(v).max()))

    ml = 0.0
    g = SpaceGrid(1, PI, 16)
    j = int(np.argmin(np.abs(g.x - PI / 2)))
    for alpha in (0.5, 1.5):
        tg = TimeGrid.graded(1.0, 1024, default_grading(alpha))
        f = SpaceTimeField.from_function(tg, g, lambda t, x: np.sin(x) + 0 * t)
        u = solve(EquationSpec.laplacian(alpha, f)).u.values[:, j]
        t = tg.nodes
        ref = t**alpha * mittag_leffler(alpha, alpha + 1, -(t**alpha))
        ml = max(ml, float(np.abs(u - ref).max() / np.abs(ref).max()))

    ok = monotone and errs[-1] <= 1e-4 and oracle <= 1e-6 and ml <= 1e-6
    detail = (
        f"manufactured errors {', '.join(f'{e:.3g}' for e in errs)}; "
        f"oracle {oracle:.3g}; Mittag-Leffler {ml:.3g}"
    )
    ok = report(capsys, 7, ok, detail, time.perf_counter() - t0, 120)
    assert ok


def test_criterion_8_maximal_regularity(capsys):
    t0 = time.perf_counter()
    rep = run_suite("full", seed=0)
    mr = [r for r in rep.results if r.check_id == "maximal-regularity"]
    sc = [r for r in rep.results if r.check_id == "scaling-invariance"]
    n_params = sum(len(r.results) for r in mr)
    growth = max(s.growth for r in mr for pr in r.results for s in pr.series)
    spread = [n for r in mr for pr in r.results for n in pr.notes if n.startswith("spread over T")]
    worst_spread = max(float(n.rsplit(" ", 1)[1]) for n in spread)
    scaling = max(c for r in sc for pr in r.results for s in pr.series for c in s.constants)
    ok = all(r.passed for r in mr + sc) and growth <= 1.25
    detail = (
        f"{n_params} parameter tuples, max drift {growth:.3f}, T spread {worst_spread:.3f}, "
        f"scaling mismatch {scaling:.3g}; full suite {'passed' if rep.passed else 'failed: ' + ' '.join(rep.failing)}"
    )
    ok = report(capsys, 8, ok and rep.passed, detail, time.perf_counter() - t0, 900)
    assert ok


def test_criterion_9_mutation(capsys):
    t0 = time.perf_counter()
    with mutated_bessel():
        rep = run_suite("fast", seed=0)
    ok = report(capsys, 9, len(rep.failing) >= 2, f"failing under mutation: {' '.join(rep.failing)}", time.perf_counter() - t0, 120)
    assert ok
