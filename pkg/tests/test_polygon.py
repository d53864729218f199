"""Polygon and instance invariants, parsing, point location, general position."""

import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geodepth.constructions import get_polygon, polygon_library
from geodepth.oracle import circumcenter
from geodepth.polygon import (Instance, InstanceError, Location, Polygon, parse_instance, point_location,
                              rel_tol, serialize_instance)
from geodepth.validation import validate_general_position

UNIT = [[0, 0], [1, 0], [1, 1], [0, 1]]


def doc(poly, pts, **kw):
    d = {"polygon": poly, "points": [{"p": p, "color": None} for p in pts], "seed": 0, "convex": False}
    d.update(kw)
    return json.dumps(d)


def test_parse_minimal():
    inst = parse_instance(doc(UNIT, [[0.5, 0.5]]))
    assert inst.n == 1
    assert inst.polygon.m == 4


def test_parse_decimal_strings_and_bytes():
    inst = parse_instance(doc([["0", "0"], ["1", "0"], ["1", "1"], ["0", "1"]], [["0.25", "0.5"]]).encode())
    assert inst.points[0].tolist() == [0.25, 0.5]


def test_parse_self_crossing():
    with pytest.raises(InstanceError, match="non-simple"):
        parse_instance(doc([[0, 0], [1, 1], [1, 0], [0, 1]], [[0.5, 0.4]]))


def test_parse_point_outside():
    with pytest.raises(InstanceError, match="point outside"):
        parse_instance(doc(UNIT, [[10, 10]]))


@pytest.mark.parametrize("raw", ["not json", "[]", '{"polygon": []}', '{"polygon": 3, "points": []}'])
def test_parse_malformed(raw):
    with pytest.raises(InstanceError, match="malformed"):
        parse_instance(raw)


def test_parse_unbalanced_colors():
    d = {"polygon": UNIT, "points": [{"p": [0.2, 0.2], "color": "red"}, {"p": [0.7, 0.7], "color": "red"}]}
    with pytest.raises(InstanceError, match="unbalanced"):
        parse_instance(json.dumps(d))


def test_polygon_rejects_clockwise_and_collinear():
    with pytest.raises(InstanceError, match="counterclockwise"):
        Polygon(UNIT[::-1])
    with pytest.raises(InstanceError, match="collinear"):
        Polygon([[0, 0], [0.5, 0], [1, 0], [1, 1], [0, 1]])


@pytest.mark.parametrize("q,loc", [((0.5, 0.5), Location.INSIDE), ((1, 0.5), Location.BOUNDARY),
                                   ((2, 0), Location.OUTSIDE), ((0, 0), Location.BOUNDARY)])
def test_point_location_square(q, loc):
    assert point_location(Polygon(UNIT), q) is loc


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(polygon_library())),
       st.floats(-1, 1), st.floats(-1, 1),
       st.floats(-50, 50), st.floats(-50, 50), st.floats(0.1, 20))
def test_point_location_similarity_invariant(pid, fx, fy, dx, dy, s):
    poly = get_polygon(pid)
    lo, hi = poly.vertices.min(axis=0), poly.vertices.max(axis=0)
    q = (lo + hi) / 2 + np.array([fx, fy]) * (hi - lo) / 2
    moved = Polygon(poly.vertices * s + [dx, dy])
    assert point_location(poly, q) is point_location(moved, q * s + [dx, dy])


def test_serialize_roundtrip_bit_exact():
    rng = np.random.default_rng(5)
    pts = rng.uniform(0.05, 0.95, (6, 2))
    inst = Instance(Polygon(UNIT), pts, ("red", "blue") * 3, 9, False, {"note": "x"})
    back = parse_instance(serialize_instance(inst))
    assert np.array_equal(back.points, inst.points)
    assert np.array_equal(back.polygon.vertices, inst.polygon.vertices)
    assert back.colors == inst.colors and back.seed == 9 and back.meta == {"note": "x"}
    assert serialize_instance(back) == serialize_instance(inst)


def test_tolerance_env_override(monkeypatch):
    assert rel_tol() == 1e-9
    monkeypatch.setenv("GEODEPTH_TOL", "1e-6")
    assert rel_tol() == 1e-6
    # a wider boundary band reclassifies a point near the edge
    assert point_location(Polygon(UNIT), (0.5, 1 - 5e-7)) is Location.BOUNDARY
    monkeypatch.setenv("GEODEPTH_TOL", "-1")
    with pytest.raises(InstanceError):
        rel_tol()


BIG = [[-10, -10], [10, -10], [10, 10], [-10, 10]]


def big(pts):
    return Instance(Polygon(BIG), np.array(pts, float))


def test_collinear_triple_flagged():
    rep = validate_general_position(big([[0, 0], [1, 0], [2, 0]]))
    assert "collinear-triple" in rep.kinds()


def test_cocircular_quadruple_flagged():
    rep = validate_general_position(big([[1, 0], [0, 1], [-1, 0], [0, -1]]))
    assert "cocircular-quadruple" in rep.kinds()


def test_jittered_versions_pass():
    tri = np.array([[0, 0], [1, 1e-3], [2, 0]])
    # brute force: the middle point is well off the segment of the others
    assert abs(tri[1, 1]) > rel_tol() * 20 * np.sqrt(2)
    assert validate_general_position(big(tri)).ok

    rng = np.random.default_rng(3)
    ang = np.array([0.0, 0.5, 1.0, 1.5]) * np.pi
    r = 1 + 1e-3 * rng.uniform(-1, 1, 4)
    quad = np.c_[r * np.cos(ang), r * np.sin(ang)]
    for k in range(4):
        rest = np.delete(quad, k, axis=0)
        c, rad = circumcenter(*rest)
        assert abs(np.hypot(*(quad[k] - c)) - rad) > 1e-6
    assert validate_general_position(big(quad)).ok
