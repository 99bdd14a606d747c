import json

import pytest

from cpattern.cli import main
from cpattern.errors import ExportError, LoadError
from cpattern.fixtures import c_fixture, three_lod_scene
from cpattern.io import (export_results, groups_from_geojson, load_config, load_scene, results_geojson,
                         results_json, scene_to_geojson, thresholds_from)
from cpattern.pipeline import run
from cpattern.scene import Scene


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


def feature(fid, lod, ring, **props):
    return {"type": "Feature", "properties": {"id": fid, "lod": lod, **props},
            "geometry": {"type": "Polygon", "coordinates": [ring]}}


def fc(*feats, crs=None):
    out = {"type": "FeatureCollection", "features": list(feats)}
    if crs:
        out["crs"] = {"type": "name", "properties": {"name": crs}}
    return out


SQ = [[0, 0], [10, 0], [10, 4], [0, 4], [0, 0]]


def test_load_three_lod_counts(tmp_path):
    scene, _ = three_lod_scene()
    p = write(tmp_path, "s.geojson", scene_to_geojson(scene))
    loaded = load_scene([p])
    assert {lod: len(loaded.at(lod)) for lod in loaded.lods} == {1: 10, 2: 7, 3: 2}
    assert [b.id for b in loaded.at(3) if b.shape_c] == ["B3"]


def test_missing_lod_names_feature(tmp_path):
    bad = feature("b7", 1, SQ)
    del bad["properties"]["lod"]
    with pytest.raises(LoadError, match="b7"):
        load_scene([write(tmp_path, "s.json", fc(bad))])


def test_duplicate_id(tmp_path):
    ring2 = [[20, 0], [30, 0], [30, 4], [20, 4], [20, 0]]
    with pytest.raises(LoadError, match="duplicate"):
        load_scene([write(tmp_path, "s.json", fc(feature("x", 1, SQ), feature("x", 1, ring2)))])


def test_invalid_ring_names_feature(tmp_path):
    bow = [[0, 0], [2, 2], [2, 0], [0, 2], [0, 0]]
    with pytest.raises(LoadError, match="bow"):
        load_scene([write(tmp_path, "s.json", fc(feature("bow", 1, bow)))])


def test_geographic_crs_rejected(tmp_path):
    with pytest.raises(LoadError, match="CRS"):
        load_scene([write(tmp_path, "s.json", fc(feature("a", 1, SQ), crs="EPSG:4326"))])


def test_degree_coordinates_rejected(tmp_path):
    ring = [[116.3, 39.9], [116.3001, 39.9], [116.3001, 39.90004], [116.3, 39.90004], [116.3, 39.9]]
    with pytest.raises(LoadError, match="degrees"):
        load_scene([write(tmp_path, "s.json", fc(feature("a", 1, ring)))])


def test_mixed_crs_rejected(tmp_path):
    a = write(tmp_path, "a.json", fc(feature("a", 1, SQ), crs="EPSG:3857"))
    ring2 = [[20, 0], [30, 0], [30, 4], [20, 4], [20, 0]]
    b = write(tmp_path, "b.json", fc(feature("b", 1, ring2), crs="EPSG:32650"))
    with pytest.raises(LoadError, match="mixed CRS"):
        load_scene([a, b])


def test_labels_attach_shape(tmp_path):
    s = write(tmp_path, "s.json", fc(feature("a", 1, SQ)))
    lab = write(tmp_path, "l.json", {"a": True})
    assert load_scene([s], labels=lab).at(1)[0].shape_c
    with pytest.raises(LoadError):
        load_scene([s], labels=write(tmp_path, "l2.json", ["zz"]))


def test_config_toml_and_overrides(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text("delta1 = 0.5\ndelta3 = 10\n")
    cfg = load_config(p)
    th = thresholds_from(cfg, {"delta3": 12.0, "delta2": None})
    assert (th.delta1, th.delta2, th.delta3) == (0.5, 2.0, 12.0)
    p.write_text("bogus = 1\n")
    with pytest.raises(LoadError):
        load_config(p)


def test_export_json_and_geojson_round_trip(tmp_path):
    scene = Scene({1: c_fixture()})
    _, groups = run(scene)
    data = json.loads(results_json(groups))
    assert [g["provenance"] for g in data["groups"]] == ["direct"]
    gj = results_geojson(groups, scene)
    back = groups_from_geojson(json.loads(json.dumps(gj)))
    assert set(back.values()) == {frozenset(g.members) for g in groups}


def test_svg_has_one_polygon_per_building(tmp_path):
    scene, _ = three_lod_scene()
    _, groups = run(scene)
    out = tmp_path / "r.svg"
    export_results(groups, scene, "svg", out)
    assert out.read_text().count("<polygon") == len(scene)


def test_export_unwritable_path(tmp_path):
    scene = Scene({1: c_fixture()})
    with pytest.raises(ExportError):
        export_results([], scene, "json", tmp_path / "missing" / "x.json")


# -- CLI ---------------------------------------------------------------------

@pytest.fixture
def fig_files(tmp_path):
    scene = tmp_path / "fig.geojson"
    truth = tmp_path / "truth.json"
    assert main(["gen-fixture", "--kind", "three-lod", "--out", str(scene), "--truth-out", str(truth)]) == 0
    return scene, truth


def test_cli_recognize_json(fig_files, tmp_path, capsys):
    scene, _ = fig_files
    assert main(["recognize", str(scene), "--lod", "1"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert {g["lod"] for g in data["groups"]} == {1}
    assert len(data["groups"]) == 3


def test_cli_passes_zero_is_direct_only(fig_files, capsys):
    scene, _ = fig_files
    assert main(["recognize", str(scene), "--passes", "0"]) == 0
    provs = {g["provenance"] for g in json.loads(capsys.readouterr().out)["groups"]}
    assert provs <= {"direct", "shape"}


def test_cli_evaluate(fig_files, capsys):
    scene, truth = fig_files
    assert main(["evaluate", str(scene), "--truth", str(truth), "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["SP+PP+EP"]["1"]["recall"] == 1.0
    assert rep["SP+PP"]["1"]["recall"] < 1.0


def test_cli_other_commands(fig_files, tmp_path, capsys):
    scene, _ = fig_files
    assert main(["build-graph", str(scene), "--out", str(tmp_path / "g.jsonl")]) == 0
    assert (tmp_path / "g.jsonl").read_text().startswith("{")
    assert main(["stats", str(scene)]) == 0
    assert "Ave_Srec" in capsys.readouterr().out
    assert main(["render", str(scene), "--out", str(tmp_path / "f.svg")]) == 0
    assert main(["bench", str(scene), "--runs", "2", "--json"]) == 0
    bench = json.loads(capsys.readouterr().out)
    assert [b["engine"] for b in bench] == ["kgraph", "baseline"]
    assert main(["recognize", str(scene), "--format", "geojson", "--out", str(tmp_path / "r.geojson")]) == 0


def test_cli_exit_codes(tmp_path, capsys, monkeypatch):
    assert main(["recognize", str(tmp_path / "nope.json")]) == 1
    assert "error" in capsys.readouterr().err
    import cpattern.cli as cli

    def boom(*a, **k):
        raise RuntimeError("bug")

    monkeypatch.setattr(cli, "load_scene", boom)
    assert main(["recognize", "x.json"]) == 2
    with pytest.raises(SystemExit):
        main(["recognize", "x.json", "--passes", "-1"])
