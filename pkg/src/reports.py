"""Report container and its three output formats.

json-lines: a header record, one record per check, a summary record and a
timing record last. csv: flat rows (sweeps, heatmaps, other records
flattened). human: aligned tables through pandas.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Optional

import pandas as pd

logger = logging.getLogger(__name__)

FORMAT_VERSION = "1"
SWEEP_COLUMNS = ["alpha", "verdict", "route", "case"]


@dataclass
class Report:
    command: str
    echo: dict = field(default_factory=dict)
    records: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    table: Optional[list] = None  # heatmap values, row-major strings
    notes: list = field(default_factory=list)
    failed: bool = False
    complete: bool = True
    timing: dict = field(default_factory=dict)
    format_version: str = FORMAT_VERSION

    def add(self, record):
        self.records.append(record)
        return record


def _json_line(record):
    return json.dumps(record, ensure_ascii=False, separators=(", ", ": "))


def _header(report):
    return {
        "record": "header",
        "format_version": report.format_version,
        "command": report.command,
        **report.echo,
        "notes": list(report.notes),
    }


def _summary(report):
    return {"record": "summary", **report.summary, "failed": report.failed, "complete": report.complete}


def _as_json_lines(report):
    lines = [_json_line(_header(report))]
    lines.extend(_json_line(record) for record in report.records)
    lines.append(_json_line(_summary(report)))
    lines.append(_json_line({"record": "timing", **report.timing}))
    return "\n".join(lines) + "\n"


def _records_frame(records):
    if not records:
        return pd.DataFrame()
    return pd.json_normalize(records, sep=".")


def _as_csv(report):
    if report.table is not None:
        return pd.DataFrame(report.table).to_csv(header=False, index=False)
    if report.command == "sweep":
        frame = pd.DataFrame(report.records, columns=SWEEP_COLUMNS)
        return frame.to_csv(index=False)
    return _records_frame(report.records).to_csv(index=False)


def _as_human(report):
    out = [f"# {report.command} (format {report.format_version})"]
    out.extend(f"# {key}: {value}" for key, value in report.echo.items())
    out.extend(f"# note: {note}" for note in report.notes)
    if report.table is not None:
        frame = pd.DataFrame(report.table)
        out.append(frame.to_string(index=False, header=False))
    elif report.records:
        columns = SWEEP_COLUMNS if report.command == "sweep" else None
        frame = _records_frame(report.records)
        if columns:
            frame = frame[columns]
        out.append(frame.fillna("").to_string(index=False))
    out.append("")
    width = max((len(str(key)) for key in report.summary), default=0)
    for key, value in report.summary.items():
        out.append(f"{str(key).ljust(width)}  {value}")
    out.append(f"{'failed'.ljust(width)}  {report.failed}")
    out.append(f"{'complete'.ljust(width)}  {report.complete}")
    return "\n".join(out) + "\n"


_EMITTERS = {
    "json-lines": _as_json_lines,
    "csv": _as_csv,
    "human": _as_human,
}


def emit_report(report, fmt="human"):
    """
    Serialises a report.
    Args:
        report (Report): The report.
        fmt (str): One of json-lines, csv, human.
    Returns:
        bytes: UTF-8 text; identical for identical reports apart from the timing record.
    """
    if fmt not in _EMITTERS:
        raise ValueError(f"unknown report format '{fmt}'")
    return _EMITTERS[fmt](report).encode("utf-8")


def write_report(report, fmt, path=None, stream=None):
    """Writes the emitted bytes to path, or to a binary stream such as sys.stdout.buffer."""
    data = emit_report(report, fmt)
    if path is None:
        stream.write(data)
        stream.flush()
        return
    try:
        with open(path, "wb") as handle:
            handle.write(data)
    except OSError as e:
        error_msg = f"Error writing report to {path}: {e}"
        logger.error(error_msg)
        raise
    logger.info(f"Report written to {path} ({len(data)} bytes).")
