"""Command line: subcommands, acceptance suites and report artifacts."""

from app.cli.commands import build_parser, run
from app.cli.reporter import Report, write_artifacts
from app.cli.suites import SUITES, run_suite

__all__ = [
    "build_parser",
    "run",
    "Report",
    "write_artifacts",
    "SUITES",
    "run_suite",
]
