"""Case-count ingestion, daily differences, moving averages and output files.

Input is the ``date,cases,deaths`` layout with ISO dates and cumulative
counts. Outputs are written byte-stable: fixed column order, floats at 17
significant digits, LF line endings.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import math
import os
from dataclasses import dataclass, field, fields, is_dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import EmptyFile, ParseError, TooShort
from .ode import TimeSeries

CASE_HEADER = ("date", "cases", "deaths")
DATA_DIR_ENV = "EPIKIT_DATA_DIR"


@dataclass
class CaseSeries:
    dates: list[dt.date]
    cases: np.ndarray
    deaths: np.ndarray
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.cases = np.asarray(self.cases, dtype=np.int64)
        self.deaths = np.asarray(self.deaths, dtype=np.int64)
        if not (len(self.dates) == len(self.cases) == len(self.deaths)):
            raise ValueError("dates, cases and deaths must have equal length")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")

    def __len__(self) -> int:
        return len(self.dates)

    def days(self) -> np.ndarray:
        """Days since the first date."""
        if not self.dates:
            return np.zeros(0)
        return np.array([(d - self.dates[0]).days for d in self.dates], dtype=float)


def resolve_data_path(path: str | os.PathLike) -> Path:
    """``path`` as given if it exists, else looked up under ``$EPIKIT_DATA_DIR``."""
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    base = os.environ.get(DATA_DIR_ENV)
    if base and (Path(base) / p).exists():
        return Path(base) / p
    return p


def _monotone_warnings(name: str, dates, values) -> list[str]:
    out = []
    for k in np.flatnonzero(np.diff(values) < 0):
        out.append(f"{name} decrease on {dates[k + 1].isoformat()}: "
                   f"{values[k]} -> {values[k + 1]}")
    return out


def parse_case_csv(text: str) -> CaseSeries:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise EmptyFile("no header")
    header = tuple(h.strip() for h in rows[0])
    if header[:3] != CASE_HEADER:
        raise ParseError(1, f"expected header {','.join(CASE_HEADER)}, got {','.join(header)}")
    dates, cases, deaths = [], [], []
    for line, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < 3 or any(not c.strip() for c in row[:3]):
            raise ParseError(line, "missing field")
        try:
            day = dt.date.fromisoformat(row[0].strip())
        except ValueError:
            raise ParseError(line, f"bad date {row[0]!r}") from None
        try:
            c, d = int(row[1]), int(row[2])
        except ValueError:
            raise ParseError(line, "counts must be integers") from None
        if c < 0 or d < 0:
            raise ParseError(line, "counts must be non-negative")
        if dates and day <= dates[-1]:
            raise ParseError(line, f"date {day} not after {dates[-1]}")
        dates.append(day)
        cases.append(c)
        deaths.append(d)
    if not dates:
        raise EmptyFile("header but no data rows")
    warn = _monotone_warnings("cases", dates, cases) + _monotone_warnings("deaths", dates, deaths)
    return CaseSeries(dates, cases, deaths, warn)


def read_case_csv(path: str | os.PathLike) -> CaseSeries:
    with open(resolve_data_path(path), newline="", encoding="utf-8") as fh:
        return parse_case_csv(fh.read())


@dataclass
class DailySeries:
    """First differences; ``negative`` marks data corrections."""

    dates: list[dt.date]
    values: np.ndarray
    negative: np.ndarray


def daily_new(values, dates: Sequence[dt.date] | None = None) -> DailySeries:
    """``out[i] = x[i+1] - x[i]``, labelled by the later date."""
    x = np.asarray(values)
    if x.size < 2:
        raise TooShort("need at least two points to difference")
    out = np.diff(x)
    labels = list(dates[1:]) if dates is not None else []
    return DailySeries(labels, out, out < 0)


def moving_average(values, window: int = 7) -> np.ndarray:
    """Trailing mean over the last ``min(window, i + 1)`` points."""
    if window < 1:
        raise ValueError("window must be at least 1")
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        return x
    csum = np.concatenate([[0.0], np.cumsum(x)])
    idx = np.arange(1, x.size + 1)
    lo = np.maximum(idx - window, 0)
    out = (csum[idx] - csum[lo]) / (idx - lo)
    # prefix sums drift on long series; recompute full windows directly
    if x.size >= window:
        out[window - 1:] = sliding_window_view(x, window).mean(axis=1)
    return out


# Output serialization


@dataclass
class Table:
    columns: list[str]
    data: list[list[Any]]  # one list per column
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def n_rows(self) -> int:
        return len(self.data[0]) if self.data else 0


def _cell(v):
    if isinstance(v, (dt.date, str)):
        return str(v)
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def as_table(result) -> Table:
    """Column view of a CaseSeries, TimeSeries, Table, mapping or dataclass."""
    if isinstance(result, Table):
        return result
    if isinstance(result, CaseSeries):
        return Table(list(CASE_HEADER), [[d.isoformat() for d in result.dates],
                                         result.cases.tolist(), result.deaths.tolist()],
                     {"warnings": list(result.warnings)} if result.warnings else {})
    if isinstance(result, TimeSeries):
        names = list(result.names) or [f"y{j}" for j in range(result.y.shape[1])]
        return Table(["t"] + names, [list(result.t)] + [list(result.y[:, j]) for j in range(len(names))])
    if is_dataclass(result) and not isinstance(result, type):
        result = {f.name: getattr(result, f.name) for f in fields(result)}
    if isinstance(result, Mapping):
        cols, data, meta = [], [], {}
        for k, v in result.items():
            arr = np.asarray(v) if not isinstance(v, (str, dict)) else None
            if arr is not None and arr.ndim == 1:
                cols.append(str(k))
                data.append([_cell(x) for x in arr.tolist()])
            else:
                meta[str(k)] = v
        lengths = {len(c) for c in data}
        if len(lengths) > 1:
            raise ValueError(f"columns have unequal lengths {sorted(lengths)}")
        return Table(cols, data, meta)
    raise TypeError(f"cannot tabulate {type(result).__name__}")


def format_number(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def _json_value(v, indent: int) -> str:
    pad = " " * indent
    if v is None:
        return "null"
    if isinstance(v, (str, dt.date)):
        return json.dumps(str(v))
    if isinstance(v, (bool, np.bool_, int, np.integer)):
        return format_number(v)
    if isinstance(v, (float, np.floating)):
        return "null" if not math.isfinite(v) else format_number(v)
    if isinstance(v, complex):
        return _json_value([v.real, v.imag], indent)
    if isinstance(v, Mapping):
        if not v:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k))}: {_json_value(x, indent + 2)}' for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(v, np.ndarray):
        v = v.tolist()
    if isinstance(v, (list, tuple)):
        if all(not isinstance(x, (list, tuple, Mapping, np.ndarray)) for x in v):
            return "[" + ", ".join(_json_value(x, indent) for x in v) + "]"
        return "[\n" + ",\n".join(pad + "  " + _json_value(x, indent + 2) for x in v) + "\n" + pad + "]"
    if is_dataclass(v):
        return _json_value({f.name: getattr(v, f.name) for f in fields(v)}, indent)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def to_json(obj) -> str:
    """Deterministic JSON with 17-significant-digit floats and NaN as null."""
    return _json_value(obj, 0) + "\n"


def table_to_csv(table: Table) -> str:
    lines = [",".join(table.columns)]
    for row in zip(*table.data):
        lines.append(",".join(x if isinstance(x, str) else format_number(x) for x in row))
    return "\n".join(lines) + "\n"


def table_to_json(table: Table) -> str:
    doc = {"format": "epikit-table", "version": 1, "columns": table.columns,
           "data": {c: col for c, col in zip(table.columns, table.data)}, "meta": table.meta}
    return to_json(doc)


def write_text(path: str | os.PathLike, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_outputs(result, fmt: str, path: str | os.PathLike) -> None:
    table = as_table(result)
    if fmt == "csv":
        text = table_to_csv(table)
    elif fmt == "json":
        text = table_to_json(table)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    write_text(path, text)


def table_schema() -> dict:
    return json.loads(resources.files("epikit").joinpath("schemas/table.schema.json").read_text())


def validate_table_json(doc: dict) -> None:
    import jsonschema

    jsonschema.validate(doc, table_schema())


def read_table_json(path: str | os.PathLike) -> Table:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    validate_table_json(doc)
    return Table(doc["columns"], [doc["data"][c] for c in doc["columns"]], doc.get("meta", {}))


def case_series_from_table(table: Table) -> CaseSeries:
    cols = {c: v for c, v in zip(table.columns, table.data)}
    return CaseSeries([dt.date.fromisoformat(d) for d in cols["date"]], cols["cases"], cols["deaths"],
                      list(table.meta.get("warnings", [])))
