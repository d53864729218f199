"""Hypothesis-driven invariants on the comb and L-shape polygons."""

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from geodepth.bisector import PairCache, diametral_depth, trace_bisector, trace_point
from geodepth.depth import check_disk_containment
from geodepth.geodesic import DegenerateCoreError, GeneralPositionError, extension_path, geodesic_core, paths_cross, sides
from geodepth.polygon import Location

SETTINGS = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture,
                                                                          HealthCheck.filter_too_much])


def _pts(e, k):
    lo, hi = e.polygon.vertices.min(axis=0), e.polygon.vertices.max(axis=0)
    coord = st.tuples(st.floats(0.0, 1.0), st.floats(0.0, 1.0)).map(lambda t: lo + np.array(t) * (hi - lo))
    return st.lists(coord, min_size=k, max_size=k).filter(
        lambda P: all(e.locate(p) is Location.INSIDE for p in P)
        and min(np.hypot(*(a - b)) for i, a in enumerate(P) for b in P[i + 1:]) > 1e-2 * e.diameter)


@SETTINGS
@given(data=st.data())
def test_metric(comb, data):
    u, v, w = data.draw(_pts(comb, 3))
    duv, dvw, duw = comb.distance(u, v), comb.distance(v, w), comb.distance(u, w)
    assert abs(duv - comb.distance(v, u)) <= 1e-12 * comb.diameter
    assert duw <= duv + dvw + 1e-9 * comb.diameter
    assert duv >= np.hypot(*(u - v)) - 1e-12
    if comb.visible(u, v):
        assert abs(duv - np.hypot(*(u - v))) <= 1e-12 * comb.diameter
    else:
        assert duv > np.hypot(*(u - v))


@SETTINGS
@given(data=st.data(), s=st.floats(0.0, 1.0))
def test_distance_convex_along_geodesics(comb, data, s):
    u, v, z = data.draw(_pts(comb, 3))
    g = comb.path(u, v)
    x = g.point_at(s * g.length)
    du, dv, dx = comb.distances([u, v, x], comb.prepare([z]))[:, 0]
    assert dx <= max(du, dv) + 1e-9 * comb.diameter
    # the path length matches the distance, and its points realize it
    assert abs(g.length - comb.distance(u, v)) <= 1e-12 * comb.diameter
    assert abs(comb.distance(u, x) + comb.distance(x, v) - g.length) <= 1e-9 * comb.diameter


@SETTINGS
@given(data=st.data())
def test_paths_cross_symmetric(comb, data):
    a, b, c, d = data.draw(_pts(comb, 4))
    g1, g2 = comb.path(a, b), comb.path(c, d)
    try:
        x = paths_cross(comb, g1, g2)
    except GeneralPositionError:
        assume(False)  # an extension path through a reflex vertex is rejected by design
    assert x == paths_cross(comb, g2, g1) == paths_cross(comb, g1.reversed(), g2)


@SETTINGS
@given(data=st.data())
def test_core_consistent(comb, data):
    a, b, c = data.draw(_pts(comb, 3))
    try:
        core = geodesic_core(comb, a, b, c)
    except DegenerateCoreError:
        assume(False)
    assert np.all(core.angles >= 0) and core.angles.sum() <= np.pi + 1e-9
    # the core sides are subpaths of the three geodesics, hence geodesics themselves
    for side in core.sides:
        L = np.hypot(*np.diff(side, axis=0).T).sum()
        assert abs(L - comb.distance(side[0], side[-1])) <= 1e-9 * comb.diameter
    # a corner sees its core vertex along a shared prefix of both paths
    for p, q in zip((a, b, c), core.vertices):
        assert comb.distance(p, q) <= min(comb.distance(p, x) for x in (a, b, c) if x is not p) + 1e-9


def _membership(e, trace, z, n=400):
    ts = np.linspace(0, 1, n + 1)
    C = np.array([trace_point(e, trace, t)[0] for t in ts])
    r = np.array([trace_point(e, trace, t)[1] for t in ts])
    return e.distances(C, e.prepare([z]))[:, 0] <= r


def test_monotone_membership_rate(comb, lshape):
    single = total = 0
    for e, seed in ((comb, 1), (lshape, 2)):
        rng = np.random.default_rng(seed)
        lo, hi = e.polygon.vertices.min(axis=0), e.polygon.vertices.max(axis=0)
        P = []
        while len(P) < 14:
            q = lo + rng.random(2) * (hi - lo)
            if e.locate(q) is Location.INSIDE:
                P.append(q)
        T = PairCache(e, np.array(P))
        for i in range(0, 14, 2):
            prof = T.profile(i, i + 1)
            per = {}
            for tr in prof.transitions:
                per.setdefault(tr.z, []).append(tr)
            for z in set(range(14)) - {i, i + 1}:
                total += 1
                single += len(per.get(z, [])) <= 1
                # anything with several transitions is flagged for the fallback path
                assert all(tr.multiple for tr in per.get(z, [])) or len(per.get(z, [])) <= 1
    assert single >= 0.99 * total


@SETTINGS
@given(data=st.data())
def test_nesting_corollary(comb, data):
    u, v, z = data.draw(_pts(comb, 3))
    trace = trace_bisector(comb, u, v)
    ext = extension_path(comb, u, v)
    sz, s1 = sides(comb, ext, np.array([z, trace.end]), strict=False)
    assume(sz != 0 and s1 != 0)
    m = _membership(comb, trace, z)
    # z left of the path is gained toward the left endpoint and never lost
    toward_end = (sz == s1)
    seq = m if toward_end else m[::-1]
    changes = np.flatnonzero(seq[1:] != seq[:-1])
    assert len(changes) <= 1
    if len(changes):
        assert seq[-1] and not seq[0]


@SETTINGS
@given(data=st.data(), t1=st.floats(0.05, 0.95), t2=st.floats(0.05, 0.95))
def test_disk_containment(comb, data, t1, t2):
    p, q = data.draw(_pts(comb, 2))
    trace = trace_bisector(comb, p, q)
    rng = np.random.default_rng(0)
    lo, hi = comb.polygon.vertices.min(axis=0), comb.polygon.vertices.max(axis=0)
    X = lo + rng.random((600, 2)) * (hi - lo)
    X = X[[comb.locate(x) is Location.INSIDE for x in X]]
    applies, tested, bad = check_disk_containment(comb, trace, p, q, t1, t2, X)
    assert bad == 0


@SETTINGS
@given(data=st.data())
def test_diametral_between_extrema(lshape, data):
    S = np.array(data.draw(_pts(lshape, 6)))
    T = PairCache(lshape, S)
    for i, j in ((0, 1), (2, 3), (4, 5)):
        prof = T.profile(i, j)
        d = diametral_depth(lshape, i, j, S)
        assert 2 <= prof.min_inside <= d <= prof.max_inside
