import json

import pytest

from sizeloc import io as sio
from sizeloc.errors import ConfigError, DataError
from sizeloc.geometry import Disc2D, Polygon2D, Singleton


def meta():
    return sio.make_meta("test", {"a": 1}, 42)


def test_config_hash_is_order_free():
    assert sio.config_hash({"a": 1, "b": [1, 2]}) == sio.config_hash({"b": [1, 2], "a": 1})
    assert sio.config_hash({"a": 1}) != sio.config_hash({"a": 2})


def test_json_round_trip(tmp_path):
    p = tmp_path / "r.json"
    sio.write_json(p, {"x": [1.5, None, float("nan")], "n": 3}, meta())
    m, doc = sio.read_json(p)
    assert m["seed"] == 42 and m["schema_version"] == sio.SCHEMA_VERSION
    assert doc == {"x": [1.5, None, None], "n": 3}


def test_csv_round_trip(tmp_path):
    p = tmp_path / "r.csv"
    rows = [["S1", 0.1, 3, None, True], ["S2", 1e-300, -1, 2.5, False]]
    sio.write_csv(p, ["id", "v", "k", "opt", "flag"], rows, meta())
    m, header, back = sio.read_csv(p)
    assert header == ["id", "v", "k", "opt", "flag"]
    assert back == rows
    assert m["config_hash"] == meta()["config_hash"]


def test_floats_round_trip_exactly(tmp_path):
    p = tmp_path / "f.csv"
    vals = [0.1 + 0.2, 1 / 3, 2.0**-60]
    sio.write_csv(p, ["v"], [[v] for v in vals], meta())
    assert [r[0] for r in sio.read_csv(p)[2]] == vals


def test_read_rejects_missing_meta(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(DataError):
        sio.read_csv(p)
    q = tmp_path / "x.json"
    q.write_text(json.dumps({"a": 1}))
    with pytest.raises(DataError):
        sio.read_json(q)
    q.write_text(json.dumps({"meta": {**meta(), "schema_version": 99}}))
    with pytest.raises(DataError, match="schema_version"):
        sio.read_json(q)


def test_bodies_jsonl(tmp_path):
    bodies = [Polygon2D([[0, 0], [1, 0], [0, 1]]), Disc2D([1, 1], 2), Singleton([3, 4])]
    p = tmp_path / "b.jsonl"
    sio.write_bodies_jsonl(p, bodies)
    assert sio.read_bodies_jsonl(p) == bodies
    p.write_text('{"type": "polygon", "vertices": [[0,0],[1,0],[2,0]]}\n')
    with pytest.raises(DataError, match=":1:"):
        sio.read_bodies_jsonl(p)


def test_load_config(tmp_path):
    t = tmp_path / "c.toml"
    t.write_text('seed = 3\ngrid = "random"\n')
    assert sio.load_config(t) == {"seed": 3, "grid": "random"}
    j = tmp_path / "c.json"
    j.write_text('{"seed": 3,\n "grid": }')
    with pytest.raises(ConfigError, match="line 2"):
        sio.load_config(j)
    with pytest.raises(ConfigError):
        sio.load_config(tmp_path / "missing.toml")
