"""Curated check lists: ``fast`` for routine runs, ``full`` for the complete sweeps."""

from __future__ import annotations

from .checks import CheckSpec, TolerancePolicy, run_check
from .report import Report

__all__ = ["SUITES", "run_suite", "suite_specs"]

ALPHAS_FI = (0.3, 0.5, 0.7, 1.2, 1.5, 1.8)
SPACES = (("2", "1"), ("2", "power:0.5"), ("3", "1"))
AP_CASES = (
    ("power:-0.9", "bounded"),
    ("1", "bounded"),
    ("power:0.5", "bounded"),
    ("power:0.9", "bounded"),
    ("power:-1", "diverging"),
    ("power:1", "diverging"),
    ("power:2", "diverging"),
)
ACCURACY = TolerancePolicy(cap=1e-6, floor=1e-9)
SCALING = TolerancePolicy(cap=1e-8, floor=1e-12)


def _spaces(**extra):
    return [dict(p=float(p), w1=w, **extra) for p, w in SPACES]


def _lp(gammas):
    out = [dict(s, gamma=g) for s in _spaces() for g in gammas]
    # outside A_2: the harness must see the constant grow
    out.append({"p": 2.0, "w1": "power:2", "gamma": 0.0, "expect": "diverging"})
    return out


def _mr_sweep(alphas, w1s, w2s):
    return [
        {"alpha": a, "p": p, "q": q, "gamma": g, "w1": w1, "w2": w2, "coef": c}
        for a in alphas
        for p, q in ((2.0, 2.0), (3.0, 2.0))
        for g in (0.0, 1.0, -1.0)
        for w1 in w1s
        for w2 in w2s
        for c in ("const", "var")
    ]


def _fast(seed: int) -> list[CheckSpec]:
    s3 = (128, 256, 512)
    st = ((32, 32), (64, 64), (128, 128))
    return [
        CheckSpec("frac-identities", [{"alpha": a} for a in ALPHAS_FI], (512, 1024), ACCURACY, seed),
        CheckSpec(
            "ialpha-bound",
            [{"alpha": a, "q": 2.0, "w2": "power:0.5", "T_values": (0.25, 0.5, 1.0, 2.0, 4.0)} for a in (0.5, 1.5)],
            (64, 128, 256),
            seed=seed,
        ),
        CheckSpec("solution-norm-bound", [{"alpha": a, "gamma": g} for a in (0.5, 1.5) for g in (0.0, 1.0)], st, seed=seed),
        CheckSpec("lp-equivalence", _lp((0.0, 1.0, -1.0)), s3, seed=seed),
        CheckSpec(
            "interpolation",
            [dict(s, gamma0=-1.0, gamma1=1.0, theta=th) for s in _spaces() for th in (0.25, 0.5, 0.75)],
            s3,
            seed=seed,
        ),
        CheckSpec("multiplier", [dict(s, gamma=g) for s in _spaces() for g in (0.0, 1.0, -1.0)], s3, seed=seed),
        CheckSpec("localization", [dict(s, gamma=g) for s in _spaces() for g in (0.0, 1.0, -1.0)], s3, seed=seed),
        CheckSpec(
            "maximal-regularity",
            [
                {"alpha": a, "p": 2.0, "q": 2.0, "gamma": 0.0, "w1": "1", "w2": "1", "coef": c}
                for a in (0.5, 1.5)
                for c in ("const", "var")
            ],
            st,
            seed=seed,
        ),
        CheckSpec(
            "maximal-regularity",
            [{"alpha": a, "T": T, "family": "tindep"} for a in (0.5, 1.5) for T in (1.0, 2.0, 4.0)],
            st,
            seed=seed,
        ),
        CheckSpec("scaling-invariance", [{"alpha": a, "r": r} for a in (0.5, 1.5) for r in (0.5, 0.25)], ((32, 32), (64, 64)), SCALING, seed),
        CheckSpec("ap-membership", [{"weight": w, "expect": e} for w, e in AP_CASES], (8, 10), seed=seed),
    ]


def _full(seed: int) -> list[CheckSpec]:
    s4 = (128, 256, 512, 1024)
    st = ((64, 64), (128, 128), (256, 256))
    return [
        CheckSpec("frac-identities", [{"alpha": a} for a in ALPHAS_FI], (256, 512, 1024), ACCURACY, seed),
        CheckSpec(
            "ialpha-bound",
            [
                {"alpha": a, "q": q, "w2": w2, "T_values": (0.25, 0.5, 1.0, 2.0, 4.0)}
                for a in (0.3, 0.5, 1.5)
                for q in (2.0, 3.0)
                for w2 in ("1", "power:0.5")
            ],
            (64, 128, 256),
            seed=seed,
        ),
        CheckSpec(
            "solution-norm-bound",
            [{"alpha": a, "gamma": g} for a in (0.3, 0.5, 1.5) for g in (0.0, 1.0, -1.0)],
            st,
            seed=seed,
        ),
        CheckSpec("lp-equivalence", _lp((0.0, 1.0, -1.0, 0.5)), s4, seed=seed),
        CheckSpec(
            "interpolation",
            [dict(s, gamma0=-1.0, gamma1=1.0, theta=th) for s in _spaces() for th in (0.25, 0.5, 0.75)]
            + [dict(s, gamma0=0.0, gamma1=2.0, theta=0.5) for s in _spaces()],
            s4,
            seed=seed,
        ),
        CheckSpec("multiplier", [dict(s, gamma=g) for s in _spaces() for g in (0.0, 1.0, -1.0, 0.5)], s4, seed=seed),
        CheckSpec("localization", [dict(s, gamma=g) for s in _spaces() for g in (0.0, 1.0, -1.0)], s4, seed=seed),
        CheckSpec("maximal-regularity", _mr_sweep((0.3, 0.5, 1.5), ("1", "power:0.5"), ("1", "power:0.5")), st, seed=seed),
        CheckSpec(
            "maximal-regularity",
            [
                {"alpha": a, "p": 2.0, "q": 2.0, "gamma": 0.0, "w1": w1, "w2": w2, "coef": "const"}
                for a in (0.3, 0.5, 0.999, 1.5)
                for w1 in ("1", "power:0.5", "power:-0.5")
                for w2 in ("1", "power:0.5")
            ],
            st,
            seed=seed,
        ),
        CheckSpec(
            "maximal-regularity",
            [
                {"alpha": a, "p": p, "q": 2.0, "gamma": 0.0, "T": T, "family": fam}
                for a in (0.3, 0.5, 1.5)
                for p in (2.0, 3.0)
                for fam in ("standard", "tindep")
                for T in (1.0, 2.0, 4.0)
            ],
            st,
            seed=seed,
        ),
        CheckSpec(
            "scaling-invariance",
            [{"alpha": a, "r": r} for a in (0.3, 0.5, 1.5) for r in (0.5, 0.25)],
            ((32, 32), (64, 64), (128, 128)),
            SCALING,
            seed,
        ),
        CheckSpec("ap-membership", [{"weight": w, "expect": e} for w, e in AP_CASES], (8, 10, 12), seed=seed),
    ]


SUITES = {"fast": _fast, "full": _full}


def suite_specs(name: str, seed: int = 0) -> list[CheckSpec]:
    """The CheckSpec list of a named suite.

    :raises ValueError: for an unknown or empty suite id.
    """
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](int(seed))


def run_suite(name: str, seed: int = 0, only=None) -> Report:
    """Run every check of a suite, sharing one solution cache.

    ``only`` optionally restricts the run to a set of check ids.
    """
    specs = suite_specs(name, seed)
    if only is not None:
        only = set(only)
        specs = [s for s in specs if s.check_id in only]
    ctx: dict = {}
    return Report(name, int(seed), [run_check(s, ctx) for s in specs])
