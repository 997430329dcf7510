"""Reporter module for console tables and JSON reports."""

import json
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional, Sequence, TextIO, Union

import numpy as np
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from axifb import __version__


def _jsonable(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    return value


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (float, np.floating)):
        return f"{value:.6g}"
    return str(value)


def create_json_report(
    payload: Dict[str, Any],
    output_path: Union[str, Path],
    summary: Optional[Dict[str, Any]] = None,
) -> Path:
    """Write a JSON report with a timestamp and summary block.

    Args:
        payload: Report body
        output_path: Destination file
        summary: Headline numbers placed under ``summary``

    Returns:
        The path written
    """
    report = {
        "timestamp": datetime.now().isoformat(),
        "version": __version__,
        "summary": _jsonable(summary or {}),
    }
    report.update(_jsonable(payload))
    path = Path(output_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(report, f, indent=2)
    return path


def create_key_value_table(title: str, rows: Mapping[str, Any]) -> Table:
    table = Table(title=title, show_header=True, header_style="bold")
    table.add_column("Quantity")
    table.add_column("Value", justify="right")
    for key, value in rows.items():
        table.add_row(key, _fmt(value))
    return table


def create_checks_table(title: str, checks: Iterable[Sequence[Any]]) -> Table:
    """Rows of (name, status, measured, bound) with the status colored."""
    table = Table(title=title, show_header=True, header_style="bold")
    table.add_column("Check")
    table.add_column("Status")
    table.add_column("Measured", justify="right")
    table.add_column("Bound", justify="right")
    colors = {"PASS": "green", "FAIL": "red", "SKIPPED": "yellow"}
    for name, status, measured, bound in checks:
        label = str(status).upper()
        color = colors.get(label, "white")
        table.add_row(name, f"[{color}]{label}[/{color}]", _fmt(measured), _fmt(bound))
    return table


def create_console_report(
    title: str,
    sections: Mapping[str, Mapping[str, Any]],
    checks: Optional[Iterable[Sequence[Any]]] = None,
    file: Optional[TextIO] = None,
    console: Optional[Console] = None,
) -> None:
    """Print a titled panel, one table per section and an optional checks table."""
    console = console or Console(file=file)
    console.print()
    console.print(Panel.fit(
        f"[bold]{title}[/bold] - {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}",
        border_style="blue",
    ))
    for name, rows in sections.items():
        if rows:
            console.print(create_key_value_table(name, rows))
    if checks is not None:
        rows = list(checks)
        console.print(create_checks_table("Checks", rows))
        failed = sum(1 for row in rows if str(row[1]).upper() == "FAIL")
        if failed:
            console.print(Panel(
                f"[bold red]{failed} check(s) failed[/bold red]",
                border_style="red",
            ))
        else:
            console.print("[green]All checks passed.[/green]")
    console.print()
