"""Smoke tests for the python bindings."""

import json
import math

import pytest

import vesselfuse as vf


def test_version():
    assert vf.__version__


def test_forward_geodetic_identity_and_oracle_value():
    assert vf.forward_geodetic((114.0, 30.0), 37.0, 0.0) == (114.0, 30.0)
    lon, lat = vf.forward_geodetic((114.0, 30.0), 90.0, 1852.0)
    assert abs(lon - 114.019194438607) < 1e-9
    assert abs(lat - 29.999998600772) < 1e-9


def test_inverse_geodetic_roundtrip():
    end = vf.forward_geodetic((5.0, 55.0), 123.0, 2500.0)
    course, dist = vf.inverse_geodetic((5.0, 55.0), end)
    assert abs(course - 123.0) < 1e-6
    assert abs(dist - 2500.0) < 1e-3


def test_mercator():
    east, north = vf.mercator((0.001, 0.0), (0.0, 0.0))
    assert abs(east - 111.31949079) < 1e-6
    assert north == 0.0


def test_dtw_and_similarity():
    x = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]
    y = [(0.0, 0.0), (2.0, 0.0)]
    dist, path = vf.dtw_exact(x, y)
    assert dist == pytest.approx(1.0)
    assert path[0] == (0, 0) and path[-1] == (2, 1)
    fast_dist, _ = vf.fastdtw(x, y, radius=4)
    assert fast_dist == dist
    assert vf.e_fastdtw(x, y) == pytest.approx(1.0)
    assert vf.direction_angle(x, list(reversed(y))) == pytest.approx(math.pi)


def test_assignment():
    matching = vf.solve_assignment([[0.0, 9.0], [9.0, 0.0]])
    assert matching == [(0, 0), (1, 1)]
    inf = float("inf")
    assert vf.solve_assignment([[inf, inf], [inf, inf]]) == []
    assert vf.brute_force_assignment([[0.0, 9.0], [9.0, 0.0]]) == matching


def test_metrics():
    assert vf.mofa(5, 3, 200) == pytest.approx(0.96)
    idp, idr, idf1 = vf.id_scores(9541, 0, 459)
    assert idp == pytest.approx(1.0)
    assert round(idf1 * 100, 2) == pytest.approx(97.65)
    precision, recall = vf.precision_recall(9, 1, 3)
    assert (precision, recall) == (pytest.approx(0.9), pytest.approx(0.75))
    assert vf.mota(2, 3, 1, 100) == pytest.approx(0.94)
    assert vf.mofp([0.2, 0.1]) == pytest.approx(0.15)


def test_pipeline_end_to_end(tmp_path):
    assert "crossing_pair" in vf.preset_names()
    files = vf.simulate("crossing_pair", str(tmp_path / "data"), seed=7)
    for key in ("ais", "detections", "gt", "config"):
        assert key in files

    out = str(tmp_path / "annotations.jsonl")
    timing = vf.fuse(files["ais"], files["detections"], files["config"], out)
    assert timing["ticks"] > 100
    assert timing["mean_s"] < 0.5

    scores = vf.evaluate(out, files["gt"], files["config"])
    assert scores["mofa"] is not None and scores["mofa"] > 0.5
    assert scores["counters"]["gt_mmsi"] > 0

    with open(out) as fh:
        first = json.loads(fh.readline())
    assert {"t", "track", "box", "prov"} <= set(first)


def test_pipeline_determinism(tmp_path):
    runs = []
    for name in ("a", "b"):
        files = vf.simulate("single_vessel", str(tmp_path / name), seed=3)
        out = str(tmp_path / f"{name}.jsonl")
        vf.fuse(files["ais"], files["detections"], files["config"], out)
        with open(out, "rb") as fh:
            runs.append(fh.read())
    assert runs[0] == runs[1] and runs[0]
