"""Tests for delimited output, JSON documents, and figure files."""

from __future__ import annotations

import json

import pytest

from hbgic.channel import BlocklengthConfig, ChannelParams
from hbgic.region import SweepConfig, latency_sweep, region_sweep
from hbgic.reporting import (
    LATENCY_COLUMNS,
    REGION_COLUMNS,
    format_value,
    latency_document,
    latency_rows,
    parse_csv,
    plot_latency,
    plot_region,
    region_document,
    region_rows,
    render_csv,
    render_json,
)

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def test_format_value_atoms():
    assert format_value(None) == ""
    assert format_value(True) == "true"
    assert format_value(False) == "false"
    assert format_value(42) == "42"
    assert format_value("x") == "x"
    assert format_value(0.1 + 0.2) == "0.30000000000000004"


def test_csv_round_trip_is_exact():
    columns = ("a", "b", "c", "d")
    rows = [
        {"a": 1, "b": 0.1 + 0.2, "c": True, "d": None},
        {"a": -7, "b": 1.2345678901234567e-300, "c": False, "d": 3},
    ]
    config = {"schema_version": 1, "nested": {"x": 0.25}}
    text = render_csv(columns, rows, config)
    doc = parse_csv(text)
    assert doc.config == config
    assert doc.columns == columns
    assert list(doc.rows) == rows, "17 significant digits reproduce every float"


def test_csv_without_config_line():
    text = render_csv(("x",), [{"x": 5}], None)
    assert not text.startswith("#")
    doc = parse_csv(text)
    assert doc.config is None
    assert doc.rows == ({"x": 5},)


def test_parse_csv_rejects_garbage():
    with pytest.raises(ValueError):
        parse_csv("")
    with pytest.raises(ValueError):
        parse_csv("a,b\n1,2,3\n")


def test_render_json_is_canonical():
    a = render_json({"b": 1, "a": {"d": 2, "c": 3}})
    b = render_json({"a": {"c": 3, "d": 2}, "b": 1})
    assert a == b
    assert a.endswith("\n")
    assert json.loads(a) == {"a": {"c": 3, "d": 2}, "b": 1}


@pytest.fixture(scope="module")
def small_sweep():
    cfg = SweepConfig(
        params=ChannelParams(a12=11.0, a21=35.0, p1=10.0, p2=10.0),
        blocklengths=BlocklengthConfig(n1=1024, n2=840),
        eps_total=1e-3,
        omega_grid=(0.0, 0.25, 0.5, 0.75, 1.0),
        rate_tolerance=1e-3,
    )
    return region_sweep(cfg)


def test_region_rows_match_columns(small_sweep):
    rows = region_rows(small_sweep)
    assert len(rows) == 5
    for row in rows:
        assert tuple(row.keys()) == REGION_COLUMNS
    doc = region_document(small_sweep, {"schema_version": 1})
    assert doc["schema_version"] == 1
    assert doc["corner"]["r1"] > 0.0
    assert doc["points"] == rows


def test_latency_rows_match_columns():
    rows = latency_sweep([35.0, 60.0], 10.0, 10.0, [512], 1e-5)
    dicts = latency_rows(rows)
    for d in dicts:
        assert tuple(d.keys()) == LATENCY_COLUMNS
    doc = latency_document(rows, {"schema_version": 1})
    assert doc["rows"] == dicts
    text = render_csv(LATENCY_COLUMNS, dicts, None)
    parsed = parse_csv(text)
    assert list(parsed.rows) == dicts


def test_plot_region_writes_png(small_sweep, tmp_path):
    path = tmp_path / "region.png"
    plot_region(small_sweep, str(path))
    data = path.read_bytes()
    assert data.startswith(PNG_MAGIC)
    assert len(data) > 1000


def test_plot_latency_writes_png(tmp_path):
    rows = latency_sweep([20.0, 40.0, 80.0], 10.0, 10.0, [256, 512], 1e-5)
    path = tmp_path / "latency.png"
    plot_latency(rows, str(path))
    data = path.read_bytes()
    assert data.startswith(PNG_MAGIC)
    assert len(data) > 1000
