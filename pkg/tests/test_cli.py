import json
import math

import numpy as np
import pytest

from fracreg.cli import main
from fracreg.frac_calc import TimeGrid
from fracreg.solver import EquationSpec, solve
from fracreg.spaces import SpaceGrid, SpaceTimeField
from fracreg.spaces.io import read_space_time
from fracreg.spaces.norms import MixedNormSpec, mixed_norm
from fracreg.verify import mutated_bessel
from fracreg.weights import parse_weight


def bump(tg, sg):
    T = tg.T
    return SpaceTimeField.from_function(
        tg, sg, lambda t, x: np.exp(-(((x - 0.5) / 0.5) ** 2)) * np.exp(-(((t - T / 2) / (T / 4)) ** 2))
    )


def value(out: str, key: str) -> str:
    for line in out.splitlines():
        if line.startswith(key + " = "):
            return line.split(" = ", 1)[1]
    raise AssertionError(f"{key} missing from {out!r}")


def test_solve_example(tmp_path, capsys):
    out = tmp_path / "sol.bin"
    assert main(["solve", "--alpha", "0.5", "--grid", "256", "--tsteps", "512", "--rhs", "bump", "--out", str(out)]) == 0
    assert out.exists() and (tmp_path / "sol.bin.json").exists()
    F, meta = read_space_time(out)
    assert meta["alpha"] == 0.5 and "scheme" in meta and meta["residual"] <= 1e-9
    assert F.tgrid.N == 512 and F.sgrid.n == 256
    assert float(value(capsys.readouterr().out, "residual")) == meta["residual"]


def test_round_trip_norm_is_bitwise(tmp_path, capsys):
    out = tmp_path / "sol.bin"
    assert main(["solve", "--alpha", "0.5", "--grid", "64", "--tsteps", "32", "--out", str(out)]) == 0
    capsys.readouterr()
    flags = ["--p", "3", "--q", "2", "--gamma", "1", "--weight-x", "power:0.5", "--weight-t", "power:0.5"]
    assert main(["norm", "--input", str(out), *flags]) == 0
    printed = float(value(capsys.readouterr().out, "norm"))
    tg, sg = TimeGrid.uniform(1.0, 32), SpaceGrid(1, math.pi, 64)
    u = solve(EquationSpec.laplacian(0.5, bump(tg, sg))).u
    spec = MixedNormSpec(2.0, 3.0, 1.0, parse_weight("power:0.5", temporal_T=1.0), parse_weight("power:0.5"), 1.0)
    assert printed == mixed_norm(u, spec)


def test_norm_json_output(tmp_path):
    sol = tmp_path / "sol.bin"
    assert main(["solve", "--grid", "32", "--tsteps", "16", "--out", str(sol)]) == 0
    res = tmp_path / "norm.json"
    assert main(["norm", "--input", str(sol), "--quantity", "uxx", "--out", str(res)]) == 0
    assert json.loads(res.read_text())["norm"] > 0


def test_config_and_flag_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"alpha": 1.5, "grid": 32, "tsteps": 16, "rhs": "sin"}))
    out = tmp_path / "a.bin"
    assert main(["solve", "--config", str(cfg), "--out", str(out)]) == 0
    assert read_space_time(out)[1]["alpha"] == 1.5
    assert main(["solve", "--config", str(cfg), "--alpha", "0.5", "--out", str(out)]) == 0
    assert read_space_time(out)[1]["alpha"] == 0.5


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--suite", "nonexistent"],
        ["verify", "--suite", ""],
        ["solve", "--bogus", "1"],
        ["frobnicate"],
        [],
        ["solve", "--grid", "32"],
        ["solve", "--alpha", "abc", "--out", "x.bin"],
        ["solve", "--alpha", "1.0", "--out", "x.bin"],
        ["solve", "--rhs", "nope", "--out", "x.bin"],
        ["norm", "--input", "missing.bin"],
        ["solve", "--config", "missing.json", "--out", "x.bin"],
    ],
)
def test_usage_errors_exit_2(argv, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"alpah": 0.5}))
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path / "x.bin")]) == 2


def test_verify_fast_writes_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["verify", "--suite", "fast", "--seed", "7", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["passed"] and data["seed"] == 7
    assert (tmp_path / "report.csv").exists()
    assert "FAIL" not in capsys.readouterr().out


def test_verify_failure_exit_1(tmp_path, capsys):
    with mutated_bessel():
        code = main(["verify", "--suite", "fast", "--out", str(tmp_path / "r.json")])
    assert code == 1
    err = capsys.readouterr().err
    assert "lp-equivalence" in err and "interpolation" in err


def test_sweep(tmp_path, capsys):
    out = tmp_path / "sweep.json"
    argv = ["sweep", "--alpha", "0.5,1.5", "--grid", "16,32", "--tsteps", "16,32", "--out", str(out)]
    assert main(argv) == 0
    assert (tmp_path / "sweep.csv").exists()
    assert "bounded" in capsys.readouterr().out


def test_sweep_mismatched_ladder(tmp_path):
    assert main(["sweep", "--grid", "16,32", "--tsteps", "8,16,32"]) == 2
