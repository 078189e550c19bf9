"""Stable on-disk formats for metrics tables and sweeps.

CSV output is bit-stable: fixed column order, floats printed with 17
significant digits (lossless for binary64), LF line endings, UTF-8, no
locale dependence. Undefined metric cells (no mass at a tally, extinct
kind) are written as empty fields and parse back to NaN. Simulation
diagnostics ride along as trailing ``# key = value`` comment lines.
"""

from __future__ import annotations

import json
import math
from typing import IO, Iterable, Mapping, Sequence, Union

from .comms import SweepPoint
from .errors import InvalidParamsError
from .metrics import MetricsRow, MetricsTable

CSV_COLUMNS = (
    "tally",
    "mass_true",
    "mass_false",
    "precision",
    "sensitivity",
    "specificity",
    "aggregated",
)


def format_float(x: float) -> str:
    """17-significant-digit decimal form; round-trips binary64 exactly."""
    if math.isnan(x):
        return ""
    return format(float(x), ".17g")


def _row_fields(row: MetricsRow) -> list[str]:
    return [
        str(row.tally),
        format_float(row.mass_true),
        format_float(row.mass_false),
        format_float(row.precision),
        format_float(row.sensitivity),
        format_float(row.specificity),
        "1" if row.aggregated else "0",
    ]


def _write_lines(fh: IO[str], lines: Iterable[str]) -> None:
    for line in lines:
        fh.write(line)
        fh.write("\n")


def emit_table(
    table: MetricsTable,
    fmt: str,
    target: Union[str, IO[str]],
    diagnostics: Mapping[str, object] | None = None,
) -> None:
    """Write one metrics table as CSV or JSON.

    ``target`` is a path or an open text stream. An empty table yields a
    header-only file.
    """
    if fmt == "csv":
        lines = [",".join(CSV_COLUMNS)]
        lines.extend(",".join(_row_fields(row)) for row in table.rows)
        if diagnostics:
            lines.extend(f"# {key} = {value}" for key, value in diagnostics.items())
    elif fmt == "json":
        payload = {
            "window": list(table.window),
            "true_kinds": list(table.true_kinds),
            "columns": list(CSV_COLUMNS),
            "rows": [
                {
                    "tally": row.tally,
                    "mass_true": row.mass_true,
                    "mass_false": row.mass_false,
                    "precision": None if math.isnan(row.precision) else row.precision,
                    "sensitivity": None if math.isnan(row.sensitivity) else row.sensitivity,
                    "specificity": None if math.isnan(row.specificity) else row.specificity,
                    "aggregated": row.aggregated,
                }
                for row in table.rows
            ],
        }
        if diagnostics:
            payload["diagnostics"] = dict(diagnostics)
        lines = json.dumps(payload, indent=2, allow_nan=False).split("\n")
    else:
        raise InvalidParamsError(f"format must be 'csv' or 'json', got {fmt!r}")

    if isinstance(target, str):
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            _write_lines(fh, lines)
    else:
        _write_lines(target, lines)


def _parse_cell(text: str) -> float:
    return math.nan if text == "" else float(text)


def parse_table(source: Union[str, IO[str]]) -> tuple[MetricsTable, dict[str, str]]:
    """Read back a CSV written by :func:`emit_table`.

    Returns the table plus any diagnostics found in trailing comments.
    The true-kind labels are not stored in CSV, so the parsed table
    carries an empty marker tuple.
    """
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()
    else:
        text = source.read()
    lines = [line for line in text.split("\n") if line]
    if not lines or lines[0] != ",".join(CSV_COLUMNS):
        raise InvalidParamsError("not a metrics-table CSV (bad or missing header)")
    rows = []
    diagnostics: dict[str, str] = {}
    for line in lines[1:]:
        if line.startswith("#"):
            body = line[1:].strip()
            key, _, value = body.partition("=")
            diagnostics[key.strip()] = value.strip()
            continue
        cells = line.split(",")
        if len(cells) != len(CSV_COLUMNS):
            raise InvalidParamsError(f"malformed row: {line!r}")
        rows.append(
            MetricsRow(
                tally=int(cells[0]),
                mass_true=_parse_cell(cells[1]),
                mass_false=_parse_cell(cells[2]),
                precision=_parse_cell(cells[3]),
                sensitivity=_parse_cell(cells[4]),
                specificity=_parse_cell(cells[5]),
                aggregated=cells[6] == "1",
            )
        )
    if rows:
        window = (rows[0].tally, rows[-1].tally)
    else:
        window = (0, 0)
    table = MetricsTable(tuple(rows), window, ())
    return table, diagnostics


def emit_sweep(
    points: Sequence[SweepPoint],
    fmt: str,
    target: Union[str, IO[str]],
) -> None:
    """Write sweep output: one metrics row per (axis value, tally)."""
    if fmt == "csv":
        header = ["axis_name", "axis_value", *CSV_COLUMNS]
        lines = [",".join(header)]
        for point in points:
            for row in point.table.rows:
                lines.append(
                    ",".join(
                        [point.axis_name, format_float(point.axis_value), *_row_fields(row)]
                    )
                )
    elif fmt == "json":
        payload = {
            "points": [
                {
                    "axis_name": point.axis_name,
                    "axis_value": point.axis_value,
                    "window": list(point.table.window),
                    "rows": [
                        {
                            "tally": row.tally,
                            "mass_true": row.mass_true,
                            "mass_false": row.mass_false,
                            "precision": None if math.isnan(row.precision) else row.precision,
                            "sensitivity": None
                            if math.isnan(row.sensitivity)
                            else row.sensitivity,
                            "specificity": None
                            if math.isnan(row.specificity)
                            else row.specificity,
                            "aggregated": row.aggregated,
                        }
                        for row in point.table.rows
                    ],
                }
                for point in points
            ]
        }
        lines = json.dumps(payload, indent=2, allow_nan=False).split("\n")
    else:
        raise InvalidParamsError(f"format must be 'csv' or 'json', got {fmt!r}")

    if isinstance(target, str):
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            _write_lines(fh, lines)
    else:
        _write_lines(target, lines)
