"""Tests for grid parsing and CSV sweeps."""
import json
from fractions import Fraction

import pandas as pd
import pytest

from src.errors import SpecError
from src.pipeline import CSV_COLUMNS
from src.sweep import SweepGrid, parse_grid, sweep, write_sweep

GRID = {
    "name": "z2 cosets",
    "groups": ["Z2^4"],
    "sets": ["cosets:0,1,2,3:4,8"],
    "eps": ["1/4", "1/2", "3/4"],
    "modes": ["subgroup"],
    "seed": 0,
}


def test_parse_grid_sources(tmp_path):
    """Dicts, JSON text and JSON files give the same grid."""
    path = tmp_path / "grid.json"
    path.write_text(json.dumps(GRID), encoding="utf-8")
    expected = parse_grid(GRID)
    assert parse_grid(json.dumps(GRID)) == expected
    assert parse_grid(str(path)) == expected
    assert expected.eps == (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
    assert len(expected.cells()) == 3


def test_grid_defaults():
    grid = parse_grid({"groups": ["Z4"], "sets": ["0,1"], "eps": ["1/2"]})
    assert grid == SweepGrid("sweep", ("Z4",), ("0,1",), (Fraction(1, 2),), ("subgroup",), 0)


@pytest.mark.parametrize("bad", [
    {**GRID, "groups": []},
    {**GRID, "sets": "0,1"},
    {**GRID, "eps": ["2"]},
    {**GRID, "modes": ["lattice"]},
    {**GRID, "seed": -1},
    {**GRID, "name": ""},
    {**GRID, "colour": "red"},
    "not json",
    "[1, 2]",
])
def test_parse_grid_rejects(bad):
    with pytest.raises(SpecError):
        parse_grid(bad)


@pytest.mark.integration
def test_sweep_rows():
    df = sweep(GRID, jobs=1)
    assert list(df.columns) == list(CSV_COLUMNS) + ["error"]
    assert len(df) == 3
    assert df["eps"].tolist() == ["1/4", "1/2", "3/4"]
    assert df["ok"].tolist() == [True, True, True]
    assert (df["error"] == "").all()


def test_single_cell():
    df = sweep({"groups": ["Z4"], "sets": ["0,1"], "eps": ["1/2"]}, jobs=1)
    assert len(df) == 1
    assert df.loc[0, "size_A"] == 2


def test_failed_cell_is_recorded():
    """A cell that cannot run keeps its row with the error filled in."""
    df = sweep({"groups": ["Z4", "Y4"], "sets": ["0,1"], "eps": ["1/2"]}, jobs=1)
    assert len(df) == 2
    assert df.loc[0, "error"] == ""
    assert df.loc[1, "error"].startswith("SpecError")
    assert pd.isna(df.loc[1, "size_A"])


@pytest.mark.integration
def test_csv_is_reproducible(tmp_path):
    first = write_sweep(sweep(GRID, jobs=1), "g", str(tmp_path / "a.csv"))
    second = write_sweep(sweep(GRID, jobs=1), "g", str(tmp_path / "b.csv"))
    with open(first, "rb") as fa, open(second, "rb") as fb:
        assert fa.read() == fb.read()


def test_default_sweep_path(output_dir):
    df = sweep({"groups": ["Z2"], "sets": ["0"], "eps": ["1/2"]}, jobs=1)
    path = write_sweep(df, "Tiny Grid")
    assert path.endswith("tiny-grid.csv")
    assert path.startswith(str(output_dir))
