"""Command-line front end: ``fracreg solve | norm | verify | sweep``.

Exit codes: 0 on success, 1 when a verification fails (failing check ids go
to standard error), 2 on usage or input errors.  Flags may also come from a
flat JSON config file (``--config``); flags given on the command line win.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np
from scipy.special import gamma as gamma_fn

from .frac_calc import TimeGrid
from .solver import EquationSpec, solve
from .spaces.grid import SpaceGrid, SpaceTimeField
from .spaces.io import read_space_time
from .spaces.multipliers import derivative
from .spaces.norms import MixedNormSpec, mixed_norm
from .verify import CheckError, CheckSpec, Report, run_check, run_suite
from .weights import parse_weight

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "alpha": "0.5",
    "p": "2",
    "q": "2",
    "gamma": "0",
    "weight_x": "1",
    "weight_t": "1",
    "grid": "64",
    "tsteps": "64",
    "T": "1",
    "suite": "fast",
    "seed": 0,
    "rhs": "bump",
    "quantity": "u",
}

KNOWN_KEYS = set(DEFAULTS) | {"out", "input"}

RHS_CHOICES = ("bump", "manufactured", "sin")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON object with flag names as keys")
    common.add_argument("--alpha", help="fractional order; sweep accepts a comma list")
    common.add_argument("--p", help="spatial integrability exponent")
    common.add_argument("--q", help="temporal integrability exponent")
    common.add_argument("--gamma", help="smoothness index")
    common.add_argument("--weight-x", dest="weight_x", help='spatial weight, e.g. "power:0.5"')
    common.add_argument("--weight-t", dest="weight_t", help='temporal weight, e.g. "power:0.5"')
    common.add_argument("--grid", help="spatial points per axis; sweep accepts a comma list")
    common.add_argument("--tsteps", help="time steps; sweep accepts a comma list")
    common.add_argument("--T", dest="T", help="final time")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output path")

    parser = _Parser(prog="fracreg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("solve", parents=[common], help="solve the model equation and write the solution")
    p.add_argument("--rhs", help=f"forcing: one of {', '.join(RHS_CHOICES)}")
    p.add_argument("--input", help="forcing as a space-time binary with manifest (overrides --rhs)")
    p = sub.add_parser("norm", parents=[common], help="mixed norm of a stored space-time field")
    p.add_argument("--input", help="space-time binary with manifest")
    p.add_argument("--quantity", help="u (the stored field) or uxx (its second derivative)")
    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("--suite", help="suite id: fast or full")
    sub.add_parser("sweep", parents=[common], help="maximal-regularity ratios over a parameter sweep")
    return parser


def _settings(args: argparse.Namespace) -> dict:
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a flat JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        unknown = set(cfg) - KNOWN_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    out = dict(DEFAULTS)
    out.update(cfg)
    out.update({k: v for k, v in vars(args).items() if v is not None})
    return out


def _num(s: dict, key: str, kind=float):
    try:
        return kind(s[key]) if kind is not int else int(str(s[key]))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"--{key.replace('_', '-')}: expected a number, got {s[key]!r}") from exc


def _list(s: dict, key: str, kind=float) -> list:
    raw = s[key]
    items = raw if isinstance(raw, list) else str(raw).split(",")
    try:
        return [kind(str(x).strip()) for x in items if str(x).strip()]
    except ValueError as exc:
        raise UsageError(f"--{key.replace('_', '-')}: expected a comma list of numbers, got {raw!r}") from exc


def _forcing(name: str, alpha: float, tg: TimeGrid, sg: SpaceGrid) -> SpaceTimeField:
    T = tg.T
    if name == "bump":
        fn = lambda t, x: np.exp(-(((x - 0.5) / 0.5) ** 2)) * np.exp(-(((t - T / 2) / (T / 4)) ** 2))  # noqa: E731
    elif name == "manufactured":
        c = gamma_fn(3.0) / gamma_fn(3.0 - alpha)
        fn = lambda t, x: (c * t ** (2 - alpha) + t**2) * np.sin(x)  # noqa: E731
    elif name == "sin":
        fn = lambda t, x: np.sin(x) + 0 * t  # noqa: E731
    else:
        raise UsageError(f"--rhs: unknown forcing {name!r}; choose from {', '.join(RHS_CHOICES)}")
    return SpaceTimeField.from_function(tg, sg, fn)


def _norm_spec(s: dict, T: float) -> MixedNormSpec:
    try:
        return MixedNormSpec(
            _num(s, "q"),
            _num(s, "p"),
            _num(s, "gamma"),
            parse_weight(str(s["weight_t"]), temporal_T=T),
            parse_weight(str(s["weight_x"])),
            T,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _laplacian(u: SpaceTimeField) -> SpaceTimeField:
    d = u.sgrid.d
    out = None
    for i in range(d):
        order = tuple(2 if k == i else 0 for k in range(d))
        v = u.map_slices(lambda f, o=order: derivative(f, o))
        out = v if out is None else out + v
    return out


def _print(key: str, value) -> None:
    if isinstance(value, float):
        print(f"{key} = {value:.17g}")
    else:
        print(f"{key} = {value}")


def _cmd_solve(s: dict) -> int:
    if not s.get("out"):
        raise UsageError("solve needs --out")
    if s.get("input"):
        try:
            F, _ = read_space_time(s["input"])
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read forcing {s['input']}: {exc}") from exc
        tg, sg = F.tgrid, F.sgrid
    else:
        tg = TimeGrid.uniform(_num(s, "T"), _num(s, "tsteps", int))
        sg = SpaceGrid(1, math.pi, _num(s, "grid", int))
        F = _forcing(str(s["rhs"]), _num(s, "alpha"), tg, sg)
    try:
        sol = solve(EquationSpec.laplacian(_num(s, "alpha"), F))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    sol.write(s["out"])
    _print("scheme", sol.scheme)
    _print("residual", sol.residual)
    _print("max_abs_u", float(np.abs(sol.u.values).max()))
    _print("written", s["out"])
    return EXIT_OK


def _cmd_norm(s: dict) -> int:
    if not s.get("input"):
        raise UsageError("norm needs --input")
    try:
        F, _ = read_space_time(s["input"])
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read {s['input']}: {exc}") from exc
    if s["quantity"] == "uxx":
        F = _laplacian(F)
    elif s["quantity"] != "u":
        raise UsageError("--quantity must be u or uxx")
    value = mixed_norm(F, _norm_spec(s, F.tgrid.T))
    _print("norm", value)
    if s.get("out"):
        Path(s["out"]).write_text(json.dumps({"norm": value, "input": s["input"], "quantity": s["quantity"]}) + "\n")
    return EXIT_OK


def _finish(report: Report, out) -> int:
    if out:
        report.write_json(out)
        report.write_csv(Path(out).with_suffix(".csv"))
    for r in report.results:
        print(f"{r.check_id:22s} {'PASS' if r.passed else 'FAIL'}")
    if not report.passed:
        print("failing checks: " + " ".join(report.failing), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _cmd_verify(s: dict) -> int:
    try:
        report = run_suite(str(s["suite"]), _num(s, "seed", int))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return _finish(report, s.get("out"))


def _cmd_sweep(s: dict) -> int:
    alphas = _list(s, "alpha")
    grids = _list(s, "grid", int)
    steps = _list(s, "tsteps", int)
    if len(steps) == 1:
        steps = steps * len(grids)
    if len(steps) != len(grids):
        raise UsageError("--tsteps needs one value or one per --grid entry")
    params = [
        {
            "alpha": a,
            "p": _num(s, "p"),
            "q": _num(s, "q"),
            "gamma": _num(s, "gamma"),
            "w1": str(s["weight_x"]),
            "w2": str(s["weight_t"]),
            "T": _num(s, "T"),
        }
        for a in alphas
    ]
    try:
        spec = CheckSpec("maximal-regularity", params, tuple(zip(steps, grids)), seed=_num(s, "seed", int))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    try:
        result = run_check(spec)
    except CheckError as exc:
        raise UsageError(str(exc)) from exc
    for pr in result.results:
        consts = " ".join(f"{c:.17g}" for c in pr.series[0].constants)
        print(f"alpha={pr.params['alpha']:g} {pr.verdict} constants: {consts}")
    return _finish(Report("sweep", spec.seed, [result]), s.get("out"))


COMMANDS = {"solve": _cmd_solve, "norm": _cmd_norm, "verify": _cmd_verify, "sweep": _cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](_settings(args))
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
