"""Deterministic text emission for tables and records (CSV or JSON)."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence


def format_float(x: float, precision: int = 12) -> str:
    """Lowercase scientific notation with ``precision`` digits after the point
    and an unpadded exponent, e.g. ``8.740320488976e-1``."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        x = 0.0  # drop the sign of -0.0
    mantissa, exp = f"{x:.{precision}e}".split("e")
    return f"{mantissa}e{int(exp)}"


def _cell(value: Any, precision: int) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return format_float(value, precision)
    return str(value)


def _json_value(value: Any, precision: int) -> Any:
    if isinstance(value, float):
        if not math.isfinite(value):
            return format_float(value, precision)
        return float(format_float(value, precision))
    return value


@dataclass
class Table:
    columns: Sequence[str]
    rows: list[Sequence[Any]]


def render_table(table: Table, fmt: str, precision: int) -> str:
    if fmt == "csv":
        lines = [",".join(table.columns)]
        lines += [",".join(_cell(v, precision) for v in row) for row in table.rows]
        return "\n".join(lines) + "\n"
    payload = [
        {c: _json_value(v, precision) for c, v in zip(table.columns, row)} for row in table.rows
    ]
    return json.dumps(payload, indent=1) + "\n"


def render_record(record: dict, fmt: str, precision: int) -> str:
    if fmt == "csv":
        return render_table(Table(list(record), [list(record.values())]), "csv", precision)
    return json.dumps({k: _json_value(v, precision) for k, v in record.items()}, indent=1) + "\n"


def write_text(text: str, path: str | Path | None) -> None:
    if path is None:
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
