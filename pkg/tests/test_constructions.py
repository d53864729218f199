import math

import numpy as np
import pytest

from geodepth.constructions import (GeneratorSpec, PlacementError, SufficiencyError, enclose_adaptive,
                                    enclose_in_large_polygon, gen_convex_circle, gen_random, gen_upper_bichrom,
                                    generate, get_polygon, polygon_library, upper_bichrom_points)
from geodepth.geodesic import build_engine, convex_position_check
from geodepth.polygon import InstanceError, Location, point_location


def test_library_polygons_valid():
    lib = polygon_library()
    assert set(lib) == {"big-square", "big-triangle", "L-shape", "comb-6", "spiral", "star-8"}
    assert not lib["big-square"].reflex_mask.any()
    assert lib["comb-6"].reflex_mask.sum() == 12
    assert lib["spiral"].reflex_mask.any()
    with pytest.raises(InstanceError, match="unknown polygon"):
        get_polygon("hexagon")


def test_random_is_deterministic_and_separated():
    a = gen_random(12, "comb-6", 5)
    b = gen_random(12, "comb-6", 5)
    assert np.array_equal(a.points, b.points)
    poly = a.polygon
    d = np.hypot(*(a.points[:, None] - a.points[None]).transpose(2, 0, 1))
    assert d[np.triu_indices(12, 1)].min() >= 1e-2 * poly.diameter
    assert all(point_location(poly, p) is Location.INSIDE for p in a.points)


def test_random_colored_balanced():
    inst = gen_random(10, "big-square", 2, colored=True)
    assert inst.colored and inst.colors.count("red") == inst.colors.count("blue") == 5
    with pytest.raises(InstanceError, match="even"):
        gen_random(9, "big-square", 2, colored=True)


def test_convex_circle():
    inst = gen_convex_circle(10, "comb-6", 3)
    assert inst.convex
    ok, _ = convex_position_check(build_engine(inst.polygon), inst.points)
    assert ok
    with pytest.raises(PlacementError, match="too small"):
        gen_convex_circle(8, "spiral", 0)


def test_upper_points_clusters():
    P, cols, meta = upper_bichrom_points(20, eps=0.1, seed=0)
    assert len(P) == 20 and cols.count("red") == cols.count("blue") == 10
    cl = meta["clusters"]
    anchors = {"S_A": meta["y"], "S_B": meta["x"], "S_C": meta["w"], "S_D": meta["v"], "S_E": meta["z"]}
    for name, (a, b) in cl.items():
        d = np.hypot(*(P[a:b] - anchors[name]).T)
        assert d.max() <= 0.1 + 1e-12
    # v is one unit from y, w one unit from x
    assert math.hypot(*(np.array(meta["v"]) - meta["y"])) == pytest.approx(1.0)
    assert math.hypot(*(np.array(meta["w"]) - meta["x"])) == pytest.approx(1.0)
    with pytest.raises(InstanceError):
        upper_bichrom_points(15)


def test_enclosure_certificate():
    P, cols, meta = upper_bichrom_points(10, seed=1)
    inst = enclose_in_large_polygon(P, 50.0, cols)
    m = inst.meta
    assert m["max_circumradius"] + np.ptp(P, axis=0).max() < m["clearance"]
    with pytest.raises(SufficiencyError):
        enclose_in_large_polygon(np.array([[0, 0], [1, 0], [0.5, 1e-4]]), 2.0)
    inst = enclose_adaptive(np.array([[0, 0], [1, 0], [0.5, 1e-4]]), 2.0)
    assert inst.meta["enclosure_factor"] > 2.0


def test_gen_upper_valid():
    inst = gen_upper_bichrom(10)
    assert inst.colored and inst.n == 10
    assert not inst.polygon.reflex_mask.any()


def test_generate_dispatch():
    a = generate(GeneratorSpec("random", 8, 4, polygon_id="L-shape"))
    assert np.array_equal(a.points, gen_random(8, "L-shape", 4).points)
    b = generate(GeneratorSpec("library_polygon", 8, 4, polygon_id="L-shape"))
    assert np.array_equal(a.points, b.points)
    with pytest.raises(InstanceError):
        generate(GeneratorSpec("nope", 8))
    with pytest.raises(InstanceError):
        generate(GeneratorSpec("random", 2))
