"""Instance generators and the polygon catalog."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .geodesic import build_engine, convex_position_check
from .polygon import Instance, InstanceError, Location, Polygon, point_location
from .validation import validate_general_position


class PlacementError(InstanceError):
    pass


class SufficiencyError(InstanceError):
    pass


# ---------------------------------------------------------------- polygons

def _comb(teeth=6):
    w = 2 * teeth + 1
    out = [(0.0, 0.0), (float(w), 0.0), (w - 1.0, 1.0)]
    for k in range(teeth - 1, -1, -1):
        x0, x1 = 2 * k + 1.0, 2 * k + 2.0
        out += [(x1, 4.0), (x0, 4.0), (x0, 1.0)]
        if k > 0:
            out.append((x0 - 1.0, 1.0))
    return out


def _spiral(turns=3, width=1.0):
    dirs = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    c = [np.zeros(2)]
    for k in range(4 * turns):
        length = 2.0 * (k // 2 + 1)
        c.append(c[-1] + length * np.array(dirs[k % 4], float))
    c = np.array(c)
    h = width / 2

    def offset(side):
        out = []
        for i in range(len(c)):
            if i == 0 or i == len(c) - 1:
                d = c[1] - c[0] if i == 0 else c[-1] - c[-2]
                d = d / np.hypot(*d)
                out.append(c[i] + side * h * np.array([-d[1], d[0]]))
                continue
            d0 = (c[i] - c[i - 1]) / np.hypot(*(c[i] - c[i - 1]))
            d1 = (c[i + 1] - c[i]) / np.hypot(*(c[i + 1] - c[i]))
            n0 = np.array([-d0[1], d0[0]])
            n1 = np.array([-d1[1], d1[0]])
            m = n0 + n1
            m = m / (m @ n0)  # miter
            out.append(c[i] + side * h * m)
        return out

    P = np.array(offset(1.0) + offset(-1.0)[::-1])
    x, y = P[:, 0], P[:, 1]
    if np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y) < 0:
        P = P[::-1]
    return P


def _star(points=8, outer=10.0, inner=4.0):
    a = np.arange(2 * points) * np.pi / points
    r = np.where(np.arange(2 * points) % 2 == 0, outer, inner)
    return np.c_[r * np.cos(a), r * np.sin(a)]


def polygon_library() -> dict[str, Polygon]:
    s3 = math.sqrt(3)
    return {
        "big-square": Polygon([(-10, -10), (10, -10), (10, 10), (-10, 10)]),
        "big-triangle": Polygon([(0, 20), (-10 * s3, -10), (10 * s3, -10)]),
        "L-shape": Polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]),
        "comb-6": Polygon(_comb(6)),
        "spiral": Polygon(_spiral(3)),
        "star-8": Polygon(_star(8)),
    }


def get_polygon(pid: str) -> Polygon:
    lib = polygon_library()
    if pid not in lib:
        raise InstanceError(f"unknown polygon id {pid!r}; known: {', '.join(lib)}")
    return lib[pid]


# a disk inside a convex piece of each polygon, for convex-position instances
_CONVEX_REGIONS = {
    "big-square": ((0.0, 0.0), 5.0),
    "big-triangle": ((0.0, 0.0), 5.0),
    "L-shape": ((0.5, 0.5), 0.35),
    "comb-6": ((6.5, 0.5), 0.4),
    "star-8": ((0.0, 0.0), 3.0),
}


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str  # upper_bichrom | convex_circle | random | library_polygon
    n: int
    seed: int = 0
    jitter: float = 1e-3
    polygon_id: str = "big-square"
    factor: float = 50.0
    colored: bool = False
    eps: float = 0.1


def generate(spec: GeneratorSpec, cache: dict | None = None) -> Instance:
    if spec.n < 3:
        raise InstanceError("n must be at least 3")
    if spec.kind == "upper_bichrom":
        return gen_upper_bichrom(spec.n, spec.eps, spec.seed, factor=spec.factor)
    if spec.kind == "convex_circle":
        return gen_convex_circle(spec.n, spec.polygon_id, spec.seed, jitter=spec.jitter, cache=cache)
    if spec.kind in ("random", "library_polygon"):
        return gen_random(spec.n, spec.polygon_id, spec.seed, spec.colored, cache=cache)
    raise InstanceError(f"unknown generator kind {spec.kind!r}")


def _balanced_colors(n, rng):
    if n % 2:
        raise InstanceError("balanced coloring needs an even number of points")
    cols = np.array(["red"] * (n // 2) + ["blue"] * (n // 2), dtype=object)
    rng.shuffle(cols)
    return tuple(cols)


def _finish(poly, pts, colors, seed, convex, meta, cache, check_convex=False):
    inst = Instance(poly, pts, colors, seed, convex, meta)
    e = build_engine(poly)
    if check_convex:
        ok, _ = convex_position_check(e, inst.points)
        if not ok:
            return None
        inst = Instance(poly, inst.points, inst.colors, seed, True, meta)
    from .bisector import PairCache
    pc = PairCache(e, inst.points, store=cache)
    rep = validate_general_position(inst, engine=e, cache=pc)
    if not rep.ok:
        if cache is not None:
            cache.clear()
        return None
    return inst


def gen_random(n: int, polygon_id: str, seed: int, colored: bool = False,
               cache: dict | None = None, retries: int = 25) -> Instance:
    """Rejection-sampled points with a minimum separation of 1e-2 diameters."""
    poly = get_polygon(polygon_id)
    diam = poly.diameter
    sep = 1e-2 * diam
    lo, hi = poly.vertices.min(axis=0), poly.vertices.max(axis=0)
    rng = np.random.default_rng(seed)
    for attempt in range(retries):
        pts = []
        tries = 0
        while len(pts) < n:
            tries += 1
            if tries > 10000 * n:
                raise PlacementError("could not place points with the required separation")
            q = lo + rng.random(2) * (hi - lo)
            if point_location(poly, q, sep) is not Location.INSIDE:
                continue
            if pts and np.min(np.hypot(*(np.array(pts) - q).T)) < sep:
                continue
            pts.append(q)
        cols = _balanced_colors(n, rng) if colored else ()
        meta = {"generator": "random", "polygon": polygon_id, "attempt": attempt}
        inst = _finish(poly, np.array(pts), cols, seed, False, meta, cache)
        if inst is not None:
            return inst
    raise PlacementError(f"retry budget exhausted after {retries} attempts")


def gen_convex_circle(n: int, polygon_id: str, seed: int, jitter: float = 1e-3,
                      cache: dict | None = None, retries: int = 25) -> Instance:
    if n < 4:
        raise InstanceError("convex-position instances need n >= 4")
    if polygon_id not in _CONVEX_REGIONS:
        raise PlacementError(f"placement region too small for polygon {polygon_id!r}")
    poly = get_polygon(polygon_id)
    (cx, cy), rad = _CONVEX_REGIONS[polygon_id]
    rng = np.random.default_rng(seed)
    for attempt in range(retries):
        th = 2 * np.pi * np.arange(n) / n + rng.uniform(0, 2 * np.pi)
        r = rad * (1 + jitter * rng.uniform(-1, 1, n))
        pts = np.c_[cx + r * np.cos(th), cy + r * np.sin(th)]
        meta = {"generator": "convex_circle", "polygon": polygon_id, "attempt": attempt}
        inst = _finish(poly, pts, (), seed, False, meta, cache, check_convex=True)
        if inst is not None:
            return inst
    raise PlacementError(f"retry budget exhausted after {retries} attempts")


# ------------------------------------------------------ large enclosure

def _circumradii(P):
    idx = np.array(list(combinations(range(len(P)), 3)))
    if len(idx) == 0:
        return np.zeros(0)
    a, b, c = P[idx[:, 0]], P[idx[:, 1]], P[idx[:, 2]]
    ab = np.hypot(*(a - b).T)
    bc = np.hypot(*(b - c).T)
    ca = np.hypot(*(c - a).T)
    area2 = np.abs((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    with np.errstate(divide="ignore"):
        return ab * bc * ca / (2 * area2)


def enclose_in_large_polygon(points, factor: float = 50.0, colors=(), seed: int = 0,
                             meta: dict | None = None) -> Instance:
    """Wrap points in an equilateral triangle of circumradius factor x diameter
    around their centroid, and certify the Euclidean regime."""
    P = np.asarray(points, float).reshape(-1, 2)
    if len(P) < 2:
        raise InstanceError("need at least two points")
    diam = float(np.max(np.hypot(*(P[:, None] - P[None]).transpose(2, 0, 1))))
    cen = P.mean(axis=0)
    R = factor * diam
    ang = np.pi / 2 + 2 * np.pi * np.arange(3) / 3
    tri = cen + R * np.c_[np.cos(ang), np.sin(ang)]
    poly = Polygon(tri)
    e = build_engine(poly)
    for i, j in combinations(range(len(P)), 2):
        if not e.visible(P[i], P[j]):
            raise SufficiencyError("a pairwise geodesic is not a straight segment")
    # distance from the point hull to the boundary; every point is inside a convex polygon
    E = poly.edges
    a, d = E[:, :2], E[:, 2:] - E[:, :2]
    nrm = np.c_[d[:, 1], -d[:, 0]] / np.hypot(*d.T)[:, None]  # outward for CCW
    clearance = float(np.min(np.einsum("kij,ij->ki", a[None] - P[:, None], nrm)))
    rmax = float(np.max(_circumradii(P))) if len(P) >= 3 else 0.0
    if not rmax + diam < clearance:
        raise SufficiencyError(f"enclosure too small: max circumradius {rmax:.6g} + diameter "
                               f"{diam:.6g} >= clearance {clearance:.6g}")
    m = dict(meta or {})
    m.update({"enclosure_factor": factor, "max_circumradius": rmax, "clearance": clearance})
    return Instance(poly, P, colors, seed, False, m)


def enclose_adaptive(points, factor: float = 50.0, colors=(), seed: int = 0, meta=None,
                     max_factor: float = 1e5) -> Instance:
    """Double the enclosure factor until the sufficiency certificate holds."""
    f = factor
    while True:
        try:
            return enclose_in_large_polygon(points, f, colors, seed, meta)
        except SufficiencyError:
            f *= 2
            if f > max_factor:
                raise


# ------------------------------------------------- upper-bound construction

def upper_bichrom_points(n: int, eps: float = 0.1, seed: int = 0, bow: float = 0.01, rng=None):
    """Points and colors of the five-cluster bichromatic configuration.

    Clusters sit on the stated segments within eps of their anchor.  Each
    cluster is bent onto a shallow parabola (offset bow*t^2/eps) so no three
    points are collinear; S_C bends to the opposite side, which keeps every
    bichromatic pair within the bound."""
    if n < 10 or n % 2:
        raise InstanceError("the bichromatic construction needs an even n >= 10")
    if not 0 < eps < 0.25:
        raise InstanceError("cluster spread must lie in (0, 1/4)")
    if rng is None:
        rng = np.random.default_rng(seed)
    x = np.array([0.0, 0.0])
    y = np.array([1.0, 0.0])
    z = np.array([0.5, math.sqrt(3) / 2])
    s1, s2, s3 = (y + z) / 2, (x + z) / 2, (x + y) / 2

    def unit(a):
        return a / np.hypot(*a)

    # one unit from y on line y s2, on the far side from s2 (likewise w)
    v = y + unit(y - s2)
    w = x + unit(x - s1)
    k = n // 5
    cnt = [k, k, k, k, n - 4 * k]
    anchors = [(y, x), (x, z), (w, s2), (v, s3), (z, y)]
    bend = [1, 1, -1, 1, 1]

    def cluster(a, b, m, side):
        ts = (np.arange(m) + 0.5 + rng.uniform(-0.2, 0.2, m)) / m * eps
        d = unit(b - a)
        nrm = np.array([-d[1], d[0]])
        return np.array([a + t * d + side * nrm * bow * eps * (t / eps) ** 2 for t in ts])

    P = np.vstack([cluster(a, b, m, s) for (a, b), m, s in zip(anchors, cnt, bend)])
    e_red = n // 2 - 2 * k
    cols = ["red"] * k + ["blue"] * k + ["red"] * k + ["blue"] * k + ["red"] * e_red + ["blue"] * (cnt[4] - e_red)
    meta = {
        "generator": "upper_bichrom", "eps": eps, "bow": bow,
        "x": x.tolist(), "y": y.tolist(), "z": z.tolist(), "v": v.tolist(), "w": w.tolist(),
        "clusters": {"S_A": [0, k], "S_B": [k, 2 * k], "S_C": [2 * k, 3 * k], "S_D": [3 * k, 4 * k],
                     "S_E": [4 * k, n]},
    }
    return P, tuple(cols), meta


def gen_upper_bichrom(n: int, eps: float = 0.1, seed: int = 0, factor: float = 50.0,
                      retries: int = 25) -> Instance:
    rng = np.random.default_rng(seed)
    for attempt in range(retries):
        P, cols, meta = upper_bichrom_points(n, eps, seed, rng=rng)
        meta["attempt"] = attempt
        inst = enclose_adaptive(P, factor, cols, seed, meta)
        if validate_general_position(inst).ok:
            return inst
    raise PlacementError(f"retry budget exhausted after {retries} attempts")
