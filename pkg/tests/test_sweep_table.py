"""
Dimple Trap - Sweep Table Unit Tests

pytest ile tablo, CSV ve JSON çıktısı testleri
"""

import csv
import json
import math

import pytest

from core.schemas import Parity, PrecisionFlag
from utils.sweep_table import PROVENANCE_PREFIX, SweepTable


@pytest.fixture
def table():
    t = SweepTable(["index", "parity", "energy", "flag"])
    t.add_row(index=0, parity=Parity.EVEN, energy=-8.833333333333334, flag=PrecisionFlag.OK)
    t.add_row(index=1, parity=Parity.ODD, energy=-6.500123, flag=PrecisionFlag.DEGRADED)
    return t


# ==================== Row Tests ====================

class TestRows:
    """Satır ve sütun işlemleri"""

    def test_add_row_fills_missing(self):
        t = SweepTable(["a", "b"])
        t.add_row(a=1.0)
        assert t.rows == [{"a": 1.0, "b": None}]

    def test_unknown_column_rejected(self):
        t = SweepTable(["a"])
        with pytest.raises(KeyError):
            t.add_row(a=1.0, c=2.0)

    def test_column(self, table):
        assert table.column("index") == [0, 1]
        with pytest.raises(KeyError):
            table.column("missing")

    def test_with_column(self, table):
        extended = table.with_column("note", ["x", "y"])
        assert extended.columns[-1] == "note"
        assert "note" not in table.columns
        with pytest.raises(ValueError):
            table.with_column("note", ["only one"])

    def test_degraded_rows(self, table):
        degraded = table.degraded_rows()
        assert len(degraded) == 1
        assert degraded[0]["index"] == 1

    def test_degraded_rows_without_flag_column(self):
        t = SweepTable(["x"])
        t.add_row(x=1.0)
        assert t.degraded_rows() == []


# ==================== Serialization Tests ====================

class TestCsv:
    """CSV çıktısı"""

    def test_header_and_values(self, table):
        text = table.to_csv()
        lines = text.splitlines()
        assert lines[0] == "index,parity,energy,flag"
        assert lines[1] == "0,even,-8.833333333333334,ok"

    def test_provenance_line(self, table):
        table.stamp({"command": "spectrum", "preset": "table1"}, version="0.1.0")
        first = table.to_csv().splitlines()[0]
        assert first.startswith(PROVENANCE_PREFIX)
        meta = json.loads(first[len(PROVENANCE_PREFIX):])
        assert meta["config"]["preset"] == "table1"
        assert meta["version"] == "0.1.0"
        assert "timestamp" in meta

    def test_written_file(self, table, tmp_path):
        target = tmp_path / "out" / "spectrum.csv"
        table.stamp({"command": "spectrum"})
        table.to_csv(target)
        lines = target.read_text(encoding="utf-8").splitlines()
        assert json.loads(lines[0][len(PROVENANCE_PREFIX):])["config"]["command"] == "spectrum"
        records = list(csv.DictReader(lines[1:]))
        assert [r["energy"] for r in records] == ["-8.833333333333334", "-6.500123"]
        assert [r["parity"] for r in records] == ["even", "odd"]

    def test_special_cells(self):
        t = SweepTable(["x", "ok", "missing"])
        t.add_row(x=math.nan, ok=True)
        line = t.to_csv().splitlines()[1]
        assert line == "nan,true,"


class TestJson:
    """JSON çıktısı"""

    def test_enums_and_complex(self, tmp_path):
        t = SweepTable(["flag", "T"])
        t.add_row(flag=PrecisionFlag.POLE, T=complex(0.5, -0.25))
        target = tmp_path / "scatter.json"
        t.to_json(target)
        data = json.loads(target.read_text(encoding="utf-8"))
        assert data["rows"][0]["flag"] == "pole"
        assert data["rows"][0]["T"] == {"re": 0.5, "im": -0.25}
