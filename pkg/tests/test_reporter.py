"""Console and JSON reports, logging and file helpers."""

import io
import json
import logging

import numpy as np
from rich.console import Console

from axifb import __version__
from axifb.reporter import create_checks_table, create_console_report, create_json_report
from axifb.utils import ensure_dir, load_yaml, save_yaml, setup_logging


def _recording_console():
    return Console(file=io.StringIO(), width=120, record=True)


def test_json_report_converts_numpy(tmp_path):
    payload = {"psi": np.arange(3.0), "flag": np.bool_(True), "count": np.int64(4), "path": tmp_path}
    path = create_json_report(payload, tmp_path / "out" / "report.json", summary={"c_star": np.float64(1.5)})
    data = json.loads(path.read_text())
    assert data["version"] == __version__
    assert data["summary"] == {"c_star": 1.5}
    assert data["psi"] == [0.0, 1.0, 2.0]
    assert data["flag"] is True and data["count"] == 4
    assert data["path"] == str(tmp_path)
    assert "timestamp" in data


def test_checks_table_rows():
    table = create_checks_table("Checks", [("a", "PASS", 1.0, "> 0"), ("b", "FAIL", -1.0, "> 0")])
    assert table.row_count == 2


def test_console_report_counts_failures():
    console = _recording_console()
    create_console_report(
        "Run", {"Summary": {"c_star": 1.25, "steady": True}, "Empty": {}},
        checks=[("a", "PASS", 1.0, "> 0"), ("b", "FAIL", -1.0, "> 0")],
        console=console,
    )
    text = console.export_text()
    assert "Run" in text and "c_star" in text and "yes" in text
    assert "1 check(s) failed" in text
    assert "Empty" not in text


def test_console_report_all_passed():
    console = _recording_console()
    create_console_report("Run", {}, checks=[("a", "PASS", 1.0, "> 0")], console=console)
    assert "All checks passed." in console.export_text()


def test_setup_logging_uses_rich_handler():
    logger = setup_logging(verbose=True, console=_recording_console())
    assert logger.name == "axifb"
    assert logger.level == logging.DEBUG
    assert len(logger.handlers) == 1
    assert not logger.propagate
    assert setup_logging().level == logging.INFO


def test_yaml_helpers(tmp_path):
    path = save_yaml({"b": 1, "a": [1, 2]}, tmp_path / "nested" / "x.yaml")
    assert list(load_yaml(path)) == ["b", "a"]
    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    assert load_yaml(empty) == {}
    assert ensure_dir(tmp_path / "d" / "e").is_dir()
