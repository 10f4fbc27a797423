"""Inequality-verification harness: checks, suites, reports."""

from .checks import (
    CHECK_IDS,
    CheckError,
    CheckResult,
    CheckSpec,
    ParamResult,
    Row,
    Series,
    TolerancePolicy,
    regularity_ratio,
    run_check,
)
from .mutation import mutated_bessel
from .report import CSV_COLUMNS, Report
from .suites import SUITES, run_suite, suite_specs

__all__ = [
    "CHECK_IDS",
    "CSV_COLUMNS",
    "CheckError",
    "CheckResult",
    "CheckSpec",
    "ParamResult",
    "Report",
    "Row",
    "SUITES",
    "Series",
    "TolerancePolicy",
    "mutated_bessel",
    "regularity_ratio",
    "run_check",
    "run_suite",
    "suite_specs",
]
