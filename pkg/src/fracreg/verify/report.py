"""Aggregated suite results with JSON and CSV writers."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .checks import CheckResult

__all__ = ["Report", "CSV_COLUMNS"]

CSV_COLUMNS = ("check_id", "param_index", "params", "instance", "side", "level", "lhs", "rhs", "ratio", "verdict")


def _g(x: float) -> str:
    return f"{x:.17g}"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


@dataclass
class Report:
    suite: str
    seed: int
    results: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failing(self) -> list[str]:
        """Ids of failing checks, each listed once, in suite order."""
        out: list[str] = []
        for r in self.results:
            if not r.passed and r.check_id not in out:
                out.append(r.check_id)
        return out

    def to_dict(self) -> dict:
        return _plain(
            {
                "suite": self.suite,
                "seed": self.seed,
                "passed": self.passed,
                "failing": self.failing,
                "checks": [r.to_dict() for r in self.results],
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    def write_json(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    def csv_rows(self):
        for r in self.results:
            verdicts = [p.verdict for p in r.results]
            for row in r.rows:
                yield (
                    r.check_id,
                    str(row.param_index),
                    json.dumps(_plain(r.results[row.param_index].params), sort_keys=True),
                    row.instance,
                    row.side,
                    json.dumps(_plain(row.level)),
                    _g(row.lhs),
                    _g(row.rhs),
                    _g(row.ratio),
                    verdicts[row.param_index],
                )

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            w.writerows(self.csv_rows())
