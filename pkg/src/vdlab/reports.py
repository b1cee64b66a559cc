"""Deterministic report.json and CSV emission.

Reports are byte-reproducible for a fixed (config, seed, code version):
keys are sorted, floats use Python's shortest round-trip repr in JSON and
17 significant digits in CSV, and the only timestamp ever written is the
value of VDLAB_TIMESTAMP (null when unset) so wall clocks never leak in.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .config import RunConfig

SIGNATURE_CONVENTION = (
    "metric diag(+1, -1, ...); covariant components are coordinate partials; "
    "indices raised by dividing with the diagonal metric entry"
)


@dataclass(frozen=True)
class CheckRow:
    """One invariant verdict: what was measured against which tolerance."""

    check_id: str
    description: str
    measured: float | str | list
    tolerance: float | str
    passed: bool


@dataclass
class ExperimentReport:
    experiment: str
    config: RunConfig
    checks: list[CheckRow] = field(default_factory=list)
    tables: dict[str, tuple[tuple[str, ...], list[tuple]]] = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def add_check(
        self,
        check_id: str,
        description: str,
        measured,
        tolerance,
        passed: bool,
    ) -> None:
        self.checks.append(CheckRow(check_id, description, measured, tolerance, bool(passed)))

    def add_table(self, name: str, header: tuple[str, ...], rows: list[tuple]) -> None:
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"table {name}: row width {len(row)} != header {len(header)}")
        self.tables[name] = (header, rows)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _json_safe(value):
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    return value


def format_cell(value) -> str:
    """CSV cell: 17 significant digits for floats, plain text otherwise."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def render_csv(header: tuple[str, ...], rows: list[tuple]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def build_manifest(report: ExperimentReport) -> dict:
    cfg = report.config
    return {
        "code_version": __version__,
        "config": cfg.raw,
        "derivative_mode": (
            f"central stencils of order {cfg.grid.stencil_order} with matching "
            "one-sided edge rows; covariant wave operator in expanded product form"
        ),
        "experiment": report.experiment,
        "include_conformal": cfg.physics.include_conformal,
        "seed": cfg.seed,
        "signature_convention": SIGNATURE_CONVENTION,
        "timestamp": os.environ.get("VDLAB_TIMESTAMP"),
    }


def render_report_json(report: ExperimentReport) -> str:
    payload = {
        "checks": [
            {
                "description": c.description,
                "id": c.check_id,
                "measured": _json_safe(c.measured),
                "passed": c.passed,
                "tolerance": _json_safe(c.tolerance),
            }
            for c in report.checks
        ],
        "diagnostics": _json_safe(report.diagnostics),
        "manifest": build_manifest(report),
        "tables": {name: f"{name}.csv" for name in report.tables},
    }
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_report(report: ExperimentReport, out_dir: str | Path) -> Path:
    """Write report.json and every table CSV; returns the report path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, (header, rows) in sorted(report.tables.items()):
        (out / f"{name}.csv").write_text(render_csv(header, rows))
    path = out / "report.json"
    path.write_text(render_report_json(report))
    return path


def summary_lines(report: ExperimentReport) -> list[str]:
    """One line per invariant: PASS/FAIL, id, measured vs tolerance."""
    lines = []
    for c in report.checks:
        verdict = "PASS" if c.passed else "FAIL"
        measured = c.measured
        if isinstance(measured, float):
            measured = f"{measured:.3e}"
        lines.append(f"[{verdict}] {c.check_id}: measured {measured} (tolerance {c.tolerance})")
    return lines
