import json
import xml.etree.ElementTree as ET

import pytest

from fastlabel.datasets import (
    DatasetError,
    deserialize_layout,
    generate_synthetic,
    layout_to_svg,
    load_points,
    make_dataset,
    save_dataset,
    serialize_layout,
)
from fastlabel.geometry import Feature, ScreenPoint
from fastlabel.selector import Layout, place_labels

from conftest import DIMS, VIEW


def test_load_csv_full_columns(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("id,x,y,priority,text\n1,10.5,20,3.5,alpha\n2,30,40,1.0,beta\n3,5,6,2.0,gamma\n")
    ds = load_points(p)
    assert ds.count == 3 and ds.name == "pts"
    assert ds.features[0] == Feature(1, ScreenPoint(10.5, 20.0), 3.5, "alpha")
    assert ds.bounds == (5.0, 6.0, 30.0, 40.0)


def test_load_csv_priority_defaults_to_reverse_row_order(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("id,x,y\n10,0,0\n11,1,1\n12,2,2\n")
    ds = load_points(p)
    assert [f.priority for f in ds.features] == [3.0, 2.0, 1.0]


def test_load_csv_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("id,x\n1,2\n")
    with pytest.raises(DatasetError, match="missing required column"):
        load_points(p)
    p.write_text("id,x,y\n1,2,oops\n")
    with pytest.raises(DatasetError, match="line 2"):
        load_points(p)
    p.write_text("id,x,y\n1,2,3\n1,4,5\n")
    with pytest.raises(DatasetError, match="duplicate feature id"):
        load_points(p)
    with pytest.raises(DatasetError, match="no such file"):
        load_points(tmp_path / "missing.csv")


def test_load_json(tmp_path):
    p = tmp_path / "pts.json"
    p.write_text(json.dumps([{"id": 1, "x": 2, "y": 3, "priority": 4, "text": "t"}]))
    ds = load_points(p)
    assert ds.features == [Feature(1, ScreenPoint(2.0, 3.0), 4.0, "t")]
    p.write_text(json.dumps({"not": "a list"}))
    with pytest.raises(DatasetError, match="array"):
        load_points(p)
    p.write_text("{broken")
    with pytest.raises(DatasetError, match="invalid JSON"):
        load_points(p)


def test_load_xy(tmp_path):
    p = tmp_path / "sites.xy"
    p.write_text("# comment\n10 20\n30 40 7.5\n\n50 60\n")
    ds = load_points(p)
    assert ds.count == 3
    assert [f.id for f in ds.features] == [0, 1, 2]
    # rows without weight inherit reverse file order; the weighted row keeps it
    assert ds.features[0].priority == 3.0
    assert ds.features[1].priority == 7.5
    assert ds.features[2].priority == 1.0
    p.write_text("1 2 3 4\n")
    with pytest.raises(DatasetError, match="line 1"):
        load_points(p)


def test_load_unknown_format(tmp_path):
    p = tmp_path / "pts.weird"
    p.write_text("x")
    with pytest.raises(DatasetError, match="unknown dataset format"):
        load_points(p)


def test_generator_deterministic_and_bounded():
    a = generate_synthetic("uniform", 200, 9, {"width": 500, "height": 400})
    b = generate_synthetic("uniform", 200, 9, {"width": 500, "height": 400})
    assert a == b
    min_x, min_y, max_x, max_y = a.bounds
    assert 0 <= min_x and max_x <= 500 and 0 <= min_y and max_y <= 400
    assert sorted(f.priority for f in a.features) == [float(i) for i in range(1, 201)]


def test_generator_edge_cases():
    assert generate_synthetic("uniform", 0, 1).count == 0
    with pytest.raises(ValueError):
        generate_synthetic("nope", 10, 1)
    with pytest.raises(ValueError):
        generate_synthetic("uniform", -1, 1)
    with pytest.raises(ValueError):
        generate_synthetic("uniform", 10, 1, {"bogus": 3})
    with pytest.raises(ValueError):
        generate_synthetic("gaussian_clusters", 10, 1, {"sigma": -5})


def test_cluster_generator_scatters_around_centers():
    ds = generate_synthetic(
        "gaussian_clusters", 500, 3, {"width": 800, "height": 800, "clusters": 1, "sigma": 10}
    )
    xs = [f.position.x for f in ds.features]
    ys = [f.position.y for f in ds.features]
    assert max(xs) - min(xs) < 150 and max(ys) - min(ys) < 150


def test_duplicate_ids_rejected():
    fs = [Feature(1, ScreenPoint(0, 0), 1.0), Feature(1, ScreenPoint(1, 1), 2.0)]
    with pytest.raises(DatasetError):
        make_dataset("dup", fs)


def test_save_load_round_trip(tmp_path):
    ds = generate_synthetic("uniform", 50, 4)
    path = tmp_path / "round.csv"
    save_dataset(ds, path)
    back = load_points(path)
    assert back.features == ds.features


def test_layout_json_round_trip():
    ds = generate_synthetic("uniform", 120, 6, {"width": 770, "height": 840})
    layout = place_labels(ds.features, VIEW, DIMS)
    assert deserialize_layout(serialize_layout(layout, "json")) == layout

    empty = place_labels([], VIEW, DIMS)
    data = json.loads(serialize_layout(empty, "json"))
    assert data["placements"] == [] and data["stats"]["total"] == 0
    assert deserialize_layout(serialize_layout(empty, "json")) == empty


def test_svg_output():
    fs = [Feature(0, ScreenPoint(100, 100), 1.0, 'a <&> label')]
    layout = place_labels(fs, VIEW, DIMS)
    svg = layout_to_svg(layout, VIEW)
    root = ET.fromstring(svg)
    assert svg.count("<rect") == 1
    assert svg.count("<circle") == 1
    assert "&lt;&amp;&gt;" in svg
    assert root.tag.endswith("svg")

    dots_only = layout_to_svg(place_labels([], VIEW, DIMS), VIEW)
    assert "<rect" not in dots_only


def test_serialize_unknown_format():
    with pytest.raises(ValueError):
        serialize_layout(Layout(), "pdf")
