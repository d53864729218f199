"""Bisector endpoints and traces, transitions, profiles, three-point and enclosing disks."""

import math

import numpy as np
import pytest

from geodepth.bisector import (ALL_PAIR, DIAMETRAL, THREE, PairCache, bisector_endpoints, depth_profile,
                               diametral_depth, disk_through_three, enclosing_disk, point_transitions,
                               trace_bisector, trace_point)
from geodepth.depth import check_enclosing
from geodepth.geodesic import build_engine
from geodepth.oracle import circumcenter
from geodepth.polygon import Location, Polygon, point_location


@pytest.fixture(scope="module")
def box5():
    return build_engine(Polygon([[-5, -5], [5, -5], [5, 5], [-5, 5]]))


U, V = np.array([-1.0, 0.0]), np.array([1.0, 0.0])


def boundary_samples(poly, step):
    pos = np.arange(0.0, poly.m, step / poly.perimeter * poly.m)
    return pos, np.array([poly.boundary_point(t) for t in pos])


def sign_changes(pos, B, f):
    s = np.sign(f)
    idx = np.flatnonzero(s[:-1] * s[1:] < 0)
    wrap = s[-1] * s[0] < 0
    pts = [B[k] + f[k] / (f[k] - f[k + 1]) * (B[k + 1] - B[k]) for k in idx]
    return pts, len(idx) + int(wrap)


def test_endpoints_symmetric(box5):
    a, b = bisector_endpoints(box5, U, V)
    assert np.allclose(a, [0, -5]) and np.allclose(b, [0, 5])


def test_endpoints_dense_scan_square(box5):
    u, v = np.array([-1.0, 0.0]), np.array([2.0, 1.0])
    pos, B = boundary_samples(box5.polygon, 1e-4)
    f = np.hypot(*(B - u).T) - np.hypot(*(B - v).T)
    pts, k = sign_changes(pos, B, f)
    assert k == 2
    got = bisector_endpoints(box5, u, v)
    for p in pts:
        assert min(np.hypot(*(p - g)) for g in got) < 1e-4


def test_endpoints_dense_scan_comb(comb):
    u, v = np.array([1.5, 3.5]), np.array([9.5, 3.0])
    assert len(comb.path(u, v).bends) >= 2
    pos, B = boundary_samples(comb.polygon, 1e-3)
    D = comb.distances(B, comb.prepare([u, v]))
    pts, k = sign_changes(pos, B, D[:, 0] - D[:, 1])
    assert k == 2
    got = bisector_endpoints(comb, u, v)
    for p in pts:
        assert min(np.hypot(*(p - g)) for g in got) < 1e-3


def test_trace_square(box5):
    tr = trace_bisector(box5, U, V)
    assert np.allclose(tr.points[:, 0], 0, atol=1e-12)
    assert tr.start[1] == pytest.approx(-5) and tr.end[1] == pytest.approx(5)
    c, r = trace_point(box5, tr, 0.5)
    assert np.allclose(c, [0, 0], atol=1e-12) and r == pytest.approx(1, abs=1e-12)


def test_trace_lshape_equidistance(lshape):
    u, v = np.array([0.2, 1.6]), np.array([1.5, 0.3])
    tr = trace_bisector(lshape, u, v)
    tol = 1e-9 * lshape.diameter
    for c in tr.points[::7]:
        assert abs(lshape.path(c, u).length - lshape.path(c, v).length) <= tol
    a, b = bisector_endpoints(lshape, u, v)
    assert np.allclose(tr.start, a, atol=tol) and np.allclose(tr.end, b, atol=tol)
    for p in (tr.start, tr.end):
        assert lshape.polygon.boundary_position(p)[1] <= tol
    # t = 0 is met first walking the boundary from vertex 0
    assert lshape.polygon.boundary_position(tr.start)[0] < lshape.polygon.boundary_position(tr.end)[0]


def test_transition_circumcenter(box5):
    tr = trace_bisector(box5, U, V)
    (t,) = point_transitions(box5, tr, (0, 2))
    c, r = trace_point(box5, tr, t.t)
    # transitions are located to the reporting tolerance
    assert abs(np.hypot(*(c - [0, 2])) - r) <= box5.tol
    assert np.allclose(c, [0, 0.75], atol=10 * box5.tol) and r == pytest.approx(1.25, abs=10 * box5.tol)
    assert t.enters  # inside on the upper side, and t grows upward


def test_transition_near_pair(box5):
    # inside iff |y - 0.1| <= sqrt(1 + y^2), i.e. y >= -4.95: one transition
    # just above the lower endpoint
    tr = trace_bisector(box5, U, V)
    (t,) = point_transitions(box5, tr, (0, 0.1))
    c, _ = trace_point(box5, tr, t.t)
    assert np.allclose(c, [0, -4.95], atol=10 * box5.tol) and t.enters
    assert point_transitions(box5, tr, (0, 0.01)) == []


def test_transition_defining_point(box5):
    tr = trace_bisector(box5, U, V)
    assert point_transitions(box5, tr, U) == []


def test_profile_pair_only(box5):
    p = depth_profile(box5, U, V, [U, V])
    assert (p.min_inside, p.max_inside, p.min_outside, p.max_outside) == (2, 2, 0, 0)


def test_profile_two_extras(box5):
    p = depth_profile(box5, U, V, [U, V, (0, 2), (0, -2)])
    assert (p.min_inside, p.max_inside) == (2, 3)
    assert (p.min_outside, p.max_outside) == (1, 2)


def test_profile_depth_at_matches_direct(comb):
    rng = np.random.default_rng(4)
    S = [(1.5, 3.5), (9.5, 3.0), (4.2, 0.6), (6.5, 2.2), (11.4, 0.4), (3.6, 3.8), (7.7, 1.3)]
    S = np.array(S)
    tr = trace_bisector(comb, S[0], S[1])
    p = depth_profile(comb, 0, 1, S, trace=tr)
    assert 2 <= p.min_inside <= p.max_inside <= len(S)
    for t in rng.random(40):
        c, r = trace_point(comb, tr, t)
        d = comb.distances([c], comb.prepare(S))[0]
        if np.min(np.abs(d[2:] - r)) < 1e-7:
            continue
        assert p.depth_at(t) == 2 + np.count_nonzero(d[2:] <= r)


@pytest.mark.parametrize("z,expect", [((0, 0.5), 3), ((0, 1.5), 2)])
def test_diametral_square(square, z, expect):
    assert diametral_depth(square, U, V, [U, V, z]) == expect


def test_diametral_lshape_direct(lshape):
    u, v = np.array([0.5, 1.8]), np.array([1.8, 0.5])
    g = lshape.path(u, v)
    assert len(g.bends) == 1
    rng = np.random.default_rng(6)
    S = [u, v]
    while len(S) < 22:
        q = rng.uniform(0, 2, 2)
        if point_location(lshape.polygon, q) is Location.INSIDE:
            S.append(q)
    m = g.midpoint
    count = sum(lshape.path(m, s).length <= 0.5 * g.length + lshape.tol for s in S)
    assert diametral_depth(lshape, 0, 1, S) == count


def test_disk_through_three_square(box5):
    ds = disk_through_three(box5, U, V, (0, 2))
    assert np.allclose(ds.center, [0, 0.75], atol=1e-9) and ds.radius == pytest.approx(1.25, abs=1e-9)
    assert disk_through_three(box5, U, V, (0, 0.01)) is None


def test_disk_through_three_random(square):
    rng = np.random.default_rng(8)
    for _ in range(10):
        p, q, z = rng.uniform(-2, 2, (3, 2))
        cc, rr = circumcenter(p, q, z)
        if np.max(np.abs(cc)) > 9:
            continue
        ds = disk_through_three(square, p, q, z)
        assert np.hypot(*(ds.center - cc)) <= 1e-6
        assert ds.radius == pytest.approx(rr, abs=1e-6)


def test_enclosing_equilateral(square):
    S = np.array([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
    res = enclosing_disk(square, S)
    assert res.kind == THREE
    assert np.allclose(res.disk.center, S.mean(axis=0), atol=1e-9)
    assert res.disk.radius == pytest.approx(1 / math.sqrt(3), abs=1e-9)


def test_enclosing_two_points(square):
    res = enclosing_disk(square, [(0, 0), (3, 1)])
    assert res.kind == DIAMETRAL
    assert np.allclose(res.disk.center, [1.5, 0.5]) and res.disk.radius == pytest.approx(math.hypot(3, 1) / 2)


def test_enclosing_comb(comb):
    rng = np.random.default_rng(10)
    lo, hi = comb.polygon.vertices.min(0), comb.polygon.vertices.max(0)
    S = []
    while len(S) < 10:
        q = lo + rng.random(2) * (hi - lo)
        if point_location(comb.polygon, q) is Location.INSIDE:
            S.append(q)
    S = np.array(S)
    T = PairCache(comb, S)
    res = enclosing_disk(comb, S, cache=T)
    assert res.kind in (THREE, DIAMETRAL, ALL_PAIR)
    d = comb.distances([res.disk.center], comb.prepare(S))[0]
    assert np.all(d <= res.disk.radius + 1e-9 * comb.diameter)
    assert check_enclosing(comb, S, res, T) == []


def test_pair_cache_store_reuse(comb):
    S = np.array([(1.5, 3.5), (9.5, 3.0), (4.2, 0.6)])
    store = {}
    T = PairCache(comb, S, store)
    p = T.profile(0, 1)
    again = PairCache(comb, S, store)
    assert again.profile(1, 0) is p
    assert set(store) == {"traces", "profiles"}
