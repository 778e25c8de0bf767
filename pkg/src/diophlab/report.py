"""Versioned CSV and JSON emission for command output.

A report is a list of named tables plus ``#`` header lines. The CSV form
writes each table as its own block:

.. code-block:: text

    # diophlab-report v1
    # command: bounds
    # summary rows: 3
    # table: bounds
    query,calculator,...
    ...

Table cells are strings in both forms; the JSON summary keeps numbers and
booleans as JSON scalars. Exact rationals render as ``p/q`` and floats are rounded
to 12 significant digits so that identical runs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

SCHEMA = "diophlab-report"
SCHEMA_VERSION = 1


def cell(x) -> str:
    """Stable text for one value."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return format(x, ".12g")
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (list, tuple)):
        return " ".join(cell(v) for v in x)
    return str(x)


def json_value(x):
    """Like :func:`cell` but keeps ints, finite floats and booleans as JSON scalars."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, float) and math.isfinite(x):
        return float(format(x, ".12g"))
    return cell(x)


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[dict] = field(default_factory=list)

    def add(self, row: dict) -> None:
        unknown = set(row) - set(self.columns)
        if unknown:
            raise KeyError(f"columns {sorted(unknown)} are not in table {self.name!r}")
        self.rows.append(row)


@dataclass
class Report:
    command: str
    config: dict
    header: list[str] = field(default_factory=list)
    tables: list[Table] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def table(self, name: str, columns: list[str]) -> Table:
        t = Table(name, list(columns))
        self.tables.append(t)
        return t

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {SCHEMA} v{SCHEMA_VERSION}\n")
        buf.write(f"# command: {self.command}\n")
        for line in self.header:
            buf.write(f"# {line}\n")
        for key, value in self.summary.items():
            buf.write(f"# summary {key}: {cell(value)}\n")
        for i, t in enumerate(self.tables):
            if i:
                buf.write("\n")
            buf.write(f"# table: {t.name}\n")
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(t.columns)
            for row in t.rows:
                w.writerow([cell(row.get(c)) for c in t.columns])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "schema": SCHEMA,
            "version": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "header": self.header,
            "summary": {k: json_value(v) for k, v in self.summary.items()},
            "tables": {t.name: [{c: cell(r.get(c)) for c in t.columns} for r in t.rows]
                       for t in self.tables},
        }
        return json.dumps(doc, indent=2) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        return self.to_csv()


def read_csv_tables(text: str) -> dict[str, list[dict]]:
    """Parse the CSV form back into ``{table name: rows}``; header lines are skipped."""
    tables: dict[str, list[dict]] = {}
    name, block = None, []

    def flush():
        if name is not None and block:
            tables[name] = list(csv.DictReader(io.StringIO("".join(block))))

    for line in text.splitlines(keepends=True):
        if line.startswith("# table: "):
            flush()
            name, block = line[len("# table: "):].strip(), []
        elif line.startswith("#") or not line.strip():
            continue
        elif name is not None:
            block.append(line)
    flush()
    return tables


def read_csv_header(text: str) -> list[str]:
    """The ``#`` lines before the first table, without the marker."""
    out = []
    for line in text.splitlines():
        if line.startswith("# table: "):
            break
        if line.startswith("# "):
            out.append(line[2:])
    return out
