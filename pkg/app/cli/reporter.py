"""Report tables, CSV/JSON artifacts and experiment records."""

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from app.config import Settings
from app.simulation.statistics import Estimate

console = Console()

COLUMNS = ["analytic", "oracle", "mc_estimate", "mc_stderr"]


def format_cell(value) -> str:
    """17 significant digits, so every cell parses back to the same float; None is an empty cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else repr(value)
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


@dataclass(frozen=True)
class OracleDelta:
    """One analytic quantity set against an independent oracle."""
    name: str
    analytic: Optional[float]
    oracle: Optional[float]
    tolerance: float
    passed: bool

    @property
    def delta(self) -> Optional[float]:
        if self.analytic is None or self.oracle is None:
            return None
        return abs(self.analytic - self.oracle)


@dataclass
class Report:
    """Rows and checks produced by one command or suite."""
    command: str
    index_name: str = "x"
    spec: Optional[dict] = None
    rows: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    checks: list[OracleDelta] = field(default_factory=list)

    def add_row(self, index, analytic=None, oracle=None, mc_estimate=None, mc_stderr=None):
        self.rows.append({self.index_name: index, "analytic": analytic, "oracle": oracle,
                          "mc_estimate": mc_estimate, "mc_stderr": mc_stderr})

    def check(self, name: str, analytic: float, oracle: float, tolerance: float) -> OracleDelta:
        """Record |analytic - oracle| <= tolerance."""
        passed = bool(abs(analytic - oracle) <= tolerance) if math.isfinite(analytic - oracle) else analytic == oracle
        delta = OracleDelta(name, float(analytic), float(oracle), float(tolerance), passed)
        self.checks.append(delta)
        return delta

    def check_estimate(self, name: str, estimate: Estimate, sigmas: float = 3.0) -> OracleDelta:
        """Record a Monte Carlo estimate against its exact value, tolerance ``sigmas`` standard errors plus its bias bound."""
        tolerance = sigmas * estimate.stderr + estimate.bias_bound
        passed = estimate.within(sigmas) if math.isfinite(tolerance) else False
        delta = OracleDelta(name, float(estimate.exact), float(estimate.value), float(tolerance), bool(passed))
        self.checks.append(delta)
        return delta

    def check_range(self, name: str, value: float, low: float, high: float, target: float) -> OracleDelta:
        """Record low <= value <= high; the tolerance stored is the half-width around ``target``."""
        passed = bool(low <= value <= high)
        delta = OracleDelta(name, float(target), float(value), max(high - target, target - low), passed)
        self.checks.append(delta)
        return delta

    def check_flag(self, name: str, passed: bool) -> OracleDelta:
        delta = OracleDelta(name, None, None, 0.0, bool(passed))
        self.checks.append(delta)
        return delta

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def oracle_deltas(self) -> dict:
        return {c.name: {"analytic": c.analytic, "oracle": c.oracle, "tolerance": c.tolerance,
                         "passed": c.passed} for c in self.checks}


def timestamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")


def write_csv(report: Report, path: Path) -> Path:
    fieldnames = [report.index_name] + COLUMNS
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(fieldnames)
        for row in report.rows:
            writer.writerow([format_cell(row.get(name)) for name in fieldnames])
    return path


def write_sidecar(report: Report, path: Path, settings: Settings) -> Path:
    """Provenance JSON: the model spec, the effective configuration, the summary and every check."""
    payload = {
        "command": report.command,
        "spec": report.spec,
        "config": asdict(settings),
        "columns": [report.index_name] + COLUMNS,
        "summary": report.summary,
        "oracle_deltas": report.oracle_deltas(),
        "passed": report.passed,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    tmp.replace(path)
    return path


def write_artifacts(report: Report, settings: Settings, stamp: Optional[str] = None) -> list[str]:
    """Write ``<command>-<timestamp>.csv`` and its ``.json`` sidecar under ``settings.out_dir``."""
    stem = f"{report.command}-{stamp or timestamp()}"
    out_dir = Path(settings.out_dir)
    csv_path = write_csv(report, out_dir / f"{stem}.csv")
    json_path = write_sidecar(report, out_dir / f"{stem}.json", settings)
    return [str(csv_path), str(json_path)]


def record_experiment(report: Report, outputs: list[str], wall_time: float, settings: Settings) -> Optional[str]:
    """Store an ExperimentRecord row when ``record_runs`` is on; returns its id."""
    if not settings.record_runs:
        return None
    from app.models import ExperimentRecord, configure, get_db, init_db

    configure(settings.database_url)
    init_db()
    db = next(get_db())
    try:
        record = ExperimentRecord(
            command=report.command,
            spec=_jsonable(report.spec),
            outputs=outputs,
            oracle_deltas=_jsonable(report.oracle_deltas()),
            wall_time=wall_time,
        )
        db.add(record)
        db.commit()
        return record.id
    except Exception as e:
        db.rollback()
        console.print(f"[yellow]Failed to record experiment:[/yellow] {escape(str(e))}")
        return None
    finally:
        db.close()


def _short(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def print_summary(report: Report):
    for key, value in report.summary.items():
        console.print(f"[bold]{key}[/bold]: {escape(_short(_jsonable(value)))}")


def print_rows(report: Report, limit: int = 25):
    if not report.rows:
        return
    table = Table(title=report.command)
    for name in [report.index_name] + COLUMNS:
        table.add_column(name, justify="right")
    for row in report.rows[:limit]:
        table.add_row(*(_short(row.get(name)) for name in [report.index_name] + COLUMNS))
    console.print(table)
    if len(report.rows) > limit:
        console.print(f"[dim]... {len(report.rows) - limit} more rows in the CSV[/dim]")


def print_checks(report: Report):
    if not report.checks:
        return
    table = Table(title=f"{report.command}: oracle deltas")
    table.add_column("check")
    table.add_column("analytic", justify="right")
    table.add_column("oracle", justify="right")
    table.add_column("|delta|", justify="right")
    table.add_column("tolerance", justify="right")
    table.add_column("status")
    for check in report.checks:
        status = "[green]✓ pass[/green]" if check.passed else "[red]✗ fail[/red]"
        table.add_row(escape(check.name), _short(check.analytic), _short(check.oracle),
                      _short(check.delta), f"{check.tolerance:.3g}", status)
    console.print(table)
