import json
import math
from fractions import Fraction as F

import pytest

from diophlab.report import SCHEMA, SCHEMA_VERSION, Report, cell, read_csv_header, read_csv_tables


@pytest.mark.parametrize("value, text", [
    (None, ""), (True, "true"), (False, "false"), (F(3, 7), "3/7"), (0.1 + 0.2, "0.3"),
    (math.inf, "inf"), (-math.inf, "-inf"), ([1, F(1, 2)], "1 1/2"), (12, "12"),
])
def test_cell(value, text):
    assert cell(value) == text


def sample():
    rep = Report("demo", {"seed": 1}, ["note: a, with comma"])
    t = rep.table("first", ["a", "b"])
    t.add({"a": 1, "b": 'quote " and, comma'})
    t.add({"a": F(1, 3)})
    rep.table("second", ["x"]).add({"x": 2.5})
    rep.summary = {"rows": 3, "ok": True, "rate": 1 / 3, "best": F(1, 3)}
    return rep


def test_csv_round_trip():
    text = sample().to_csv()
    assert text.startswith(f"# {SCHEMA} v{SCHEMA_VERSION}\n# command: demo\n")
    tables = read_csv_tables(text)
    assert tables["first"] == [{"a": "1", "b": 'quote " and, comma'}, {"a": "1/3", "b": ""}]
    assert tables["second"] == [{"x": "2.5"}]
    header = read_csv_header(text)
    assert "summary rows: 3" in header and "note: a, with comma" in header


def test_json_shape():
    doc = json.loads(sample().to_json())
    assert doc["schema"] == SCHEMA and doc["version"] == 1
    assert doc["summary"] == {"rows": 3, "ok": True, "rate": 0.333333333333, "best": "1/3"}
    assert doc["tables"]["first"][1] == {"a": "1/3", "b": ""}


def test_unknown_column():
    with pytest.raises(KeyError):
        sample().tables[0].add({"zzz": 1})


def test_render_is_deterministic():
    assert sample().render("csv") == sample().render("csv")
    assert sample().render("json") == sample().render("json")
