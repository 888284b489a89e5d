"""Command-line front end."""

from .commands import (
    EXIT_FATAL,
    EXIT_OK,
    EXIT_PARTIAL,
    CliConfig,
    analyze_entry,
    build_parser,
    cmd_analyze,
    cmd_batch,
    cmd_model,
    parse_cli,
    run,
)

__all__ = [
    "CliConfig",
    "EXIT_FATAL",
    "EXIT_OK",
    "EXIT_PARTIAL",
    "analyze_entry",
    "build_parser",
    "cmd_analyze",
    "cmd_batch",
    "cmd_model",
    "parse_cli",
    "run",
]
