import json

import numpy as np
import pytest

from sizeloc import io as sio
from sizeloc.applications import IntervalDataset
from sizeloc.cli import bundled_dataset_path, main
from sizeloc.geometry import negate
from sizeloc.process import TriangleParams, gen_triangle_series


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


def read_any(path):
    return sio.read_json(path) if path.suffix == ".json" else sio.read_csv(path)


def test_steiner_default_triangle(tmp_path):
    code, out = run(tmp_path, "steiner", "--directions", "2048")
    assert code == 0
    meta, doc = sio.read_json(out / "steiner.json")
    np.testing.assert_allclose(doc["steiner_exact"], [0.375, 0.375], atol=1e-15)
    np.testing.assert_allclose(doc["steiner_quadrature"], [0.375, 0.375], atol=1e-3)
    assert meta["seed"] == 0 and meta["command"] == "steiner"


def test_steiner_from_file(tmp_path):
    f = tmp_path / "poly.json"
    f.write_text(json.dumps({"vertices": [[0, 0], [2, 0], [2, 2], [0, 2]]}))
    code, out = run(tmp_path, "steiner", "--input", str(f))
    assert code == 0
    np.testing.assert_allclose(sio.read_json(out / "steiner.json")[1]["steiner_exact"], [1, 1], atol=1e-15)


def test_scenario_outputs(tmp_path):
    code, out = run(tmp_path, "scenario", "--scenario", "S1", "--reps", "2", "--n", "100", "--directions", "32")
    assert code == 0
    _, header, rows = sio.read_csv(out / "summary.csv")
    row = dict(zip(header, rows[0]))
    assert row["corr_size_mean"] == pytest.approx(1.0)
    assert row["corr_steiner_mean"] == pytest.approx(-1.0)
    _, header, rows = sio.read_csv(out / "reports.csv")
    assert len(rows) == 2 and "corr_loc_res" in header


def test_single_replication_leaves_sd_empty(tmp_path):
    code, out = run(tmp_path, "scenario", "--scenario", "S3", "--reps", "1", "--n", "60", "--directions", "16")
    assert code == 0
    _, header, rows = sio.read_csv(out / "summary.csv")
    row = dict(zip(header, rows[0]))
    assert row["corr_size_sd"] is None and row["corr_size_mean"] is not None


def test_s4_sweep_plot_file(tmp_path):
    code, out = run(tmp_path, "scenario", "--scenario", "S4", "--reps", "2", "--n", "60", "--directions", "16")
    assert code == 0
    _, header, rows = sio.read_csv(out / "plot_alpha_sweep.csv")
    assert [r[0] for r in rows] == [0.0, 0.25, 0.5, 0.75, 1.0]


def test_estimate_from_jsonl(tmp_path):
    xs = gen_triangle_series(TriangleParams(), 50, 1)
    sio.write_bodies_jsonl(tmp_path / "x.jsonl", xs)
    sio.write_bodies_jsonl(tmp_path / "y.jsonl", [negate(x) for x in xs])
    code, out = run(tmp_path, "estimate", "--input", str(tmp_path / "x.jsonl"),
                    "--input-y", str(tmp_path / "y.jsonl"), "--directions", "64")
    assert code == 0
    rep = sio.read_json(out / "report.json")[1]["report"]
    assert rep["corr_size"] == pytest.approx(1.0) and rep["corr_loc"] == pytest.approx(-1.0)


def test_mixing_matches_geometric_decay(tmp_path):
    code, out = run(tmp_path, "mixing")
    assert code == 0
    _, header, rows = sio.read_csv(out / "mixing.csv")
    for row in rows:
        r = dict(zip(header, row))
        assert r["proxy_size"] == pytest.approx(0.6 ** r["k"], abs=0.05)


def test_regress_bundled_dataset(tmp_path):
    code, out = run(tmp_path, "regress")
    assert code == 0
    doc = sio.read_json(out / "fit.json")[1]
    d = IntervalDataset.from_csv(bundled_dataset_path())
    beta = np.linalg.solve(d.x.T @ d.x, d.x.T @ d.c)
    np.testing.assert_allclose(doc["beta"], beta, rtol=1e-10)


def test_robust(tmp_path):
    f = tmp_path / "lp.json"
    f.write_text(json.dumps({"rows": [{"a": [[1, 3]], "b": [2, 2]}], "x": [0.5]}))
    code, out = run(tmp_path, "robust", "--input", str(f))
    assert code == 0
    doc = sio.read_json(out / "robust.json")[1]
    assert doc["feasible"] is True and doc["slack"] == [-0.5]


def test_decay_and_mse(tmp_path):
    code, out = run(tmp_path, "decay", "--reps", "100", "--n-grid", "64,128,256,512")
    assert code == 0
    doc = sio.read_json(out / "decay_summary.json")[1]
    assert -1.3 < doc["slope"] < -0.7
    assert not any(c["violated"] for c in doc["chebyshev"])
    code, out = run(tmp_path, "mse-rate", "--reps", "20", "--n-grid", "50,100", "--m-grid", "8,16", name="m")
    assert code == 0
    assert len(sio.read_csv(out / "mse_rate.csv")[2]) == 4


def test_exit_codes(tmp_path):
    assert run(tmp_path, "robust")[0] == 2  # missing input
    assert run(tmp_path, "steiner", "--directions", "7")[0] == 2
    bad = tmp_path / "bad.toml"
    bad.write_text("directions = 64\nunknown_key = 1\n")
    assert run(tmp_path, "steiner", "--config", str(bad))[0] == 2
    assert run(tmp_path, "regress", "--input", str(tmp_path / "nope.csv"))[0] == 3
    poly = tmp_path / "p.json"
    poly.write_text(json.dumps({"vertices": [[0, 0], [1, 0], [2, 0]]}))
    assert run(tmp_path, "steiner", "--input", str(poly))[0] == 3
    with pytest.raises(SystemExit) as exc:
        main(["scenario", "--scenario", "S9"])
    assert exc.value.code == 2


def test_rank_deficient_dataset_is_data_error(tmp_path, capsys):
    f = tmp_path / "d.csv"
    rows = ["x1,x2,c,r"] + [f"1,1,{i},{i}" for i in range(5)]
    f.write_text("\n".join(rows) + "\n")
    assert run(tmp_path, "regress", "--input", str(f))[0] == 3
    assert "x2" in capsys.readouterr().err


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('directions = 64\nseed = 5\n')
    code, out = run(tmp_path, "steiner", "--config", str(cfg), "--seed", "9")
    assert code == 0
    meta, doc = sio.read_json(out / "steiner.json")
    assert meta["seed"] == 9 and doc["directions"]["M"] == 64


def test_every_output_parses(tmp_path):
    code, out = run(tmp_path, "scenario", "--scenario", "S4", "--reps", "2", "--n", "40", "--directions", "16")
    assert code == 0
    for p in out.iterdir():
        meta, *_ = read_any(p)
        assert meta["seed"] == 0 and meta["version"]
