"""Atomic artifact writers and input file readers."""

from __future__ import annotations

import json

import pytest

from artifacts import (
    format_cell,
    read_permutation,
    read_vertex_weights,
    write_csv,
    write_json,
)


def test_write_json_is_atomic_and_strict(tmp_path):
    path = write_json(tmp_path / "nested" / "doc.json", {"x": 0.1, "bad": float("inf"), "k": [1, 2]})
    assert path.read_text().endswith("}\n")
    assert json.loads(path.read_text()) == {"x": 0.1, "bad": None, "k": [1, 2]}
    assert not list(path.parent.glob("*.tmp"))


def test_write_csv_float_format(tmp_path):
    path = write_csv(tmp_path / "t.csv", ("k", "v", "ok"), [(0, 0.1, True), (1, None, False)])
    assert path.read_text() == "k,v,ok\n0,0.10000000000000001,yes\n1,,no\n"


def test_format_cell():
    assert format_cell(1 / 3) == "0.33333333333333331"
    assert format_cell(7) == "7"
    assert format_cell("a") == "a"


def test_read_vertex_weights_pairs_and_column(tmp_path):
    pairs = tmp_path / "pairs.csv"
    pairs.write_text("vertex,weight\n2,0.5\n0,0.5\n")
    assert read_vertex_weights(pairs, 4) == [0.5, 0.0, 0.5, 0.0]
    column = tmp_path / "column.csv"
    column.write_text("0.25\n0.25\n0.5\n")
    assert read_vertex_weights(column, 3) == [0.25, 0.25, 0.5]


def test_read_vertex_weights_rejects_bad_vertex(tmp_path):
    path = tmp_path / "w.csv"
    path.write_text("9,1.0\n")
    with pytest.raises(ValueError, match="outside"):
        read_vertex_weights(path, 4)


def test_read_permutation(tmp_path):
    path = tmp_path / "p.txt"
    path.write_text("3 2 # swap\n4,5\n")
    assert read_permutation(path) == [3, 2, 4, 5]
