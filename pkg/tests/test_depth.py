"""Bounds reports, crossings, dominating pairs and the lemma checks."""

import math
from itertools import combinations

import numpy as np
import pytest

from geodepth.bisector import PairCache, restrict_profile
from geodepth.constructions import gen_random, gen_upper_bichrom
from geodepth.depth import (bounds_report, check_quadrilateral, check_triangle_lemmas, dominating_bound,
                            dominating_pairs, intersection_lower_bound, intersection_number, ordering_violations,
                            theorem_bounds, theorem_suite)
from geodepth.geodesic import build_engine, geodesic_core
from geodepth.oracle import sampled_profile
from geodepth.polygon import Instance, Polygon


@pytest.fixture(scope="module")
def comb30():
    store = {}
    inst = gen_random(30, "comb-6", 11, cache=store)
    e = build_engine(inst.polygon)
    return inst, e, PairCache(e, inst.points, store)


def test_report_three_points_vs_oracle(square):
    S = np.array([[-1.0, 0.0], [1.0, 0.0], [0.1, 0.3]])
    inst = Instance(square.polygon, S)
    rep = bounds_report(inst, square)
    best = max(sampled_profile(square, i, j, S).min_inside for i, j in combinations(range(3), 2))
    assert rep.pi == best
    # the third point sits in the bounded part shared by every disk through the other two
    near = np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, 0.0]]) + [[0, 0.01], [0, -0.01], [0.001, 0.0]]
    assert bounds_report(Instance(square.polygon, near), square).pi == 3


def test_report_comb_n30(comb30):
    inst, e, T = comb30
    rep = bounds_report(inst, e, T)
    assert rep.pi >= math.ceil(30 / 5) + 1
    assert rep.pi_diam >= math.ceil(30 / 3) + 1
    assert not ordering_violations(rep)
    assert rep.pi_bichrom is None and rep.pi_convex is None
    w = rep.variants["pi"].witness
    assert rep.row(*w).min_in == rep.pi
    # ties go to the first pair in lexicographic order
    assert w == min((r.u, r.v) for r in rep.rows if r.min_in == rep.pi)


def test_report_csv_and_dict(comb30):
    inst, e, T = comb30
    rep = bounds_report(inst, e, T)
    lines = rep.to_csv().splitlines()
    assert lines[0] == "pair_u,pair_v,min_in,max_in,min_out,diam"
    assert len(lines) == 1 + math.comb(30, 2)
    d = rep.to_dict()
    assert d["pi"] == rep.pi and len(d["pairs"]) == math.comb(30, 2)


def test_report_similarity_invariant(comb):
    S = np.array([(1.5, 3.5), (9.5, 3.0), (4.2, 0.6), (5.5, 2.2), (11.4, 0.4), (3.6, 3.8), (7.7, 0.3), (7.3, 1.9)])
    inst = Instance(comb.polygon, S)
    th = 0.4
    Rm = 2.5 * np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    moved = Instance(Polygon(comb.polygon.vertices @ Rm.T + [3, -7]), S @ Rm.T + [3, -7])
    a, b = bounds_report(inst), bounds_report(moved)
    assert a.rows == b.rows


def test_intersection_convex_pentagon(square):
    th = 2 * np.pi * np.arange(5) / 5 + 0.1
    S = np.c_[3 * np.cos(th), 3 * np.sin(th)]
    assert intersection_number(square, S) == 5


def _seg_cross(a, b, c, d):
    def o(p, q, r):
        return np.sign((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))
    return o(a, b, c) * o(a, b, d) < 0 and o(c, d, a) * o(c, d, b) < 0


def test_intersection_brute_force(square):
    rng = np.random.default_rng(12)
    for S in (np.array([[0, 0], [4, 0], [2, 3], [2, 1]]), rng.uniform(-5, 5, (7, 2))):
        brute = 0
        for q in combinations(range(len(S)), 4):
            a, b, c, d = q
            for (p1, p2), (p3, p4) in (((a, b), (c, d)), ((a, c), (b, d)), ((a, d), (b, c))):
                brute += _seg_cross(S[p1], S[p2], S[p3], S[p4])
        assert intersection_number(square, S) == brute
    assert intersection_number(square, np.array([[0, 0], [4, 0], [2, 3], [2, 1]])) == 0


def test_intersection_lower_bound_comb(comb30):
    inst, e, T = comb30
    assert intersection_number(e, inst.points) >= intersection_lower_bound(30)


def test_dominating_pairs(comb30):
    inst, e, T = comb30
    sub = list(range(0, 30, 4))[:8]
    assert dominating_pairs(e, inst.points, "inside", sub, T) >= dominating_bound(8) == 10
    assert dominating_pairs(e, inst.points, "outside", sub, T) >= 10
    assert dominating_pairs(e, inst.points, "inside", sub[:4], T) >= dominating_bound(4) == 0


def test_dominating_pairs_vs_oracle(comb):
    S = np.array([(1.5, 3.5), (9.5, 3.0), (4.2, 0.6), (5.5, 2.2), (11.4, 0.4), (3.6, 3.8)])
    brute = 0
    for i, j in combinations(range(6), 2):
        brute += sampled_profile(comb, i, j, S, 1e-4).min_inside >= 3
    assert dominating_pairs(comb, S, "inside") == brute


def test_quadrilateral_square(square):
    u, v, p, q = (-1, -1.02), (1, 1), (-1.01, 1), (1, -1)
    res = check_quadrilateral(square, u, v, p, q)
    assert res.ok
    with pytest.raises(ValueError, match="do not cross"):
        check_quadrilateral(square, (-1, -1), (1, -1.1), (-1, 1), (1, 1.2))


@pytest.mark.parametrize("quad", [
    ((-8, 0), (8, 0.1), (6, -0.5), (6.3, 0.6)),
    ((-1, -1.02), (1, 1), (-1.01, 1), (1, -1)),
    ((-3, 0.2), (3, -0.1), (0.5, -4), (-0.4, 5)),
])
def test_quadrilateral_matches_oracle(square, quad):
    S = np.array(quad, float)
    res = check_quadrilateral(square, *S)
    puv = sampled_profile(square, 0, 1, S, 1e-4)
    ppq = sampled_profile(square, 2, 3, S, 1e-4)

    def case(a, b):
        return "both" if a and b else "case-uv" if a else "case-pq" if b else None

    assert res.contain == case(puv.min_inside >= 3, ppq.min_inside >= 3)
    assert res.exclude == case(puv.max_inside <= 3, ppq.max_inside <= 3)
    assert res.ok


def test_quadrilateral_comb_crossings(comb30):
    inst, e, T = comb30
    from geodepth.depth import crossing_pairs, side_matrix
    sub = np.arange(12)
    sm = side_matrix(e, inst.points[sub])
    T12 = PairCache(e, inst.points[sub])
    quads = crossing_pairs(e, inst.points[sub], sm)
    assert quads
    for q in quads:
        assert check_quadrilateral(e, *q, cache=T12, sm=sm).ok


def test_triangle_right_angle(square):
    r = check_triangle_lemmas(square, (1, 0), (0, 0), (0, 1))
    assert r.geq_applies and r.geq_ok
    assert r.lengths[2] == pytest.approx(math.sqrt(2))


def test_triangle_small_angle(square):
    a = math.pi / 6
    r = check_triangle_lemmas(square, (2, 0), (0, 0), (math.cos(a), math.sin(a)))
    assert r.leq_applies and r.leq_ok and not r.geq_applies


def test_triangle_lshape_recomputed(lshape):
    u, v, w = np.array([0.2, 1.9]), np.array([0.5, 0.4]), np.array([1.9, 0.6])
    r = check_triangle_lemmas(lshape, u, v, w)
    core = geodesic_core(lshape, u, v, w)
    # recompute the angle at v from the first segments of g(v,u) and g(v,w)
    gu, gw = lshape.path(v, u), lshape.path(v, w)
    d1, d2 = gu.points[1] - v, gw.points[1] - v
    ang = math.acos(d1 @ d2 / (np.hypot(*d1) * np.hypot(*d2)))
    assert r.angle == pytest.approx(ang, abs=1e-12) == pytest.approx(core.angles[1], abs=1e-12)
    assert r.geq_ok and r.leq_ok


def test_leq_with_core_angle_counterexample(comb):
    # v sits in a tooth and sees neither u nor w: the core angle at v is small
    # while the straight angle uvw is wide, and |uw| exceeds both geodesic sides
    u, v, w = (12.216948534621727, 0.5679442215619974), (9.325543540599762, 2.854257750697957), \
        (6.993201084057154, 0.9866455091364976)
    r = check_triangle_lemmas(comb, u, v, w)
    assert r.v_is_core_vertex and r.angle < math.pi / 3 < r.euclid_angle
    assert r.leq_applies and not r.leq_ok
    a, b, _, uw = r.lengths
    assert uw > max(a, b) + 1.0


def test_theorem_bounds_values():
    b = {tid: bound for tid, _, _, bound, _ in theorem_bounds(28)}
    assert b["pi>=ceil(n/5)+1"] == 7
    assert b["pi_diam>=ceil(n/3)+1"] == 11
    assert b["pi_bichrom>=ceil(n/(6+sqrt26))+1"] == 4
    assert b["pi_bichrom_in_out>=ceil(n/(14+2sqrt43))+1"] == 3
    assert b["pi_bichrom>=ceil((n-2)/36)+2"] == 3
    assert b["pi_bichrom>=ceil((n-2)/72)"] == 1
    assert b["pi_in_out>=ceil(16(n-2)/665)"] == 1


def test_theorem_suite_random(comb30):
    inst, e, T = comb30
    th = theorem_suite(inst, bounds_report(inst, e, T))
    assert all(lr.ok for lr in th)
    ids = {lr.lemma for lr in th}
    assert "pi>=ceil(n/5)+1" in ids and "variant-ordering" in ids
    assert "pi_bichrom<=ceil(n/5)+1" not in ids


def test_theorem_suite_upper_construction():
    inst = gen_upper_bichrom(20, seed=7)
    th = theorem_suite(inst)
    up = [lr for lr in th if lr.lemma == "pi_bichrom<=ceil(n/5)+1"]
    assert len(up) == 1 and up[0].ok
    assert up[0].detail["value"] <= 5


def test_restrict_profile_counts(comb30):
    inst, e, T = comb30
    p = T.profile(0, 1)
    sub = [0, 1, 5, 9, 14]
    q = restrict_profile(p, sub)
    assert q.n == 5 and 2 <= q.min_inside <= q.max_inside <= 5
