"""Geodesic shortest paths inside a simple polygon via the reflex visibility graph."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.sparse.csgraph import shortest_path
from scipy.spatial import ConvexHull

from . import _kernels as K
from .polygon import InstanceError, Location, Polygon, point_location, rel_tol


class GeneralPositionError(ValueError):
    """Input hits a degeneracy the geometry assumes away."""


class DegenerateCoreError(GeneralPositionError):
    pass


class Targets(NamedTuple):
    """Points prepared for batched distance queries: coordinates plus their
    geodesic distances to every reflex vertex."""

    pts: np.ndarray
    reflex_dist: np.ndarray

    def take(self, idx) -> "Targets":
        idx = list(idx)
        return Targets(np.ascontiguousarray(self.pts[idx]), np.ascontiguousarray(self.reflex_dist[idx]))


class Engine:
    """Read-only geometry for one polygon.  Built once, then queried."""

    def __init__(self, polygon: Polygon, tol: float | None = None):
        self.polygon = polygon
        self.diameter = polygon.diameter
        self.tol = tol if tol is not None else rel_tol() * self.diameter
        # kernel slack for orientation tests, well under the reporting tolerance
        self.eps = 1e-2 * self.tol
        self.E = np.ascontiguousarray(polygon.edges)
        V = polygon.vertices
        self.reflex_idx = np.flatnonzero(polygon.reflex_mask)
        self.R = np.ascontiguousarray(V[self.reflex_idx]).reshape(-1, 2)
        self.visibility = self._vertex_visibility()
        r = len(self.reflex_idx)
        W = np.zeros((r, r))
        for a in range(r):
            for b in range(a + 1, r):
                ia, ib = self.reflex_idx[a], self.reflex_idx[b]
                if self.visibility[ia, ib]:
                    W[a, b] = W[b, a] = np.hypot(*(V[ia] - V[ib]))
        if r:
            self.Drr, self.pred = shortest_path(W, method="D", directed=False, return_predecessors=True)
        else:
            self.Drr = np.zeros((0, 0))
            self.pred = np.zeros((0, 0), int)
        self.Drr = np.ascontiguousarray(self.Drr)

    def _vertex_visibility(self) -> np.ndarray:
        V = self.polygon.vertices
        m = len(V)
        vis = np.zeros((m, m), bool)
        for i in range(m):
            vis[i, i] = True
            vis[i, (i + 1) % m] = vis[(i + 1) % m, i] = True
        for i in range(m):
            for j in range(i + 2, m):
                if i == 0 and j == m - 1:
                    continue
                vis[i, j] = vis[j, i] = (self._segment_inside(V[i], V[j], skip=(i, j))
                                         and not self._passes_vertex(i, j))
        return vis

    def _passes_vertex(self, i, j) -> bool:
        """A vertex on the open segment splits the edge; Dijkstra routes through it at equal length."""
        V = self.polygon.vertices
        a, d = V[i], V[j] - V[i]
        L2 = float(d @ d)
        s = (V - a) @ d / L2
        off = np.abs(d[0] * (V[:, 1] - a[1]) - d[1] * (V[:, 0] - a[0])) / np.sqrt(L2)
        hit = (s > 0) & (s < 1) & (off <= self.eps)
        hit[[i, j]] = False
        return bool(hit.any())

    def _segment_inside(self, a, b, skip=()) -> bool:
        """Closed-polygon containment of segment ab, robust to vertices lying on it."""
        V = self.polygon.vertices
        d = b - a
        L = float(np.hypot(*d))
        if L == 0.0:
            return K.inside_closed(a[0], a[1], self.E, self.eps)
        cuts = [0.0, 1.0]
        for k, w in enumerate(V):
            if k in skip:
                continue
            s = float((w - a) @ d) / (L * L)
            if 0.0 < s < 1.0 and abs(d[0] * (w[1] - a[1]) - d[1] * (w[0] - a[0])) / L <= self.eps:
                cuts.append(s)
        cuts.sort()
        for s0, s1 in zip(cuts[:-1], cuts[1:]):
            p, q = a + s0 * d, a + s1 * d
            if K.seg_crosses(p[0], p[1], q[0], q[1], self.E, self.eps):
                return False
            mid = 0.5 * (p + q)
            if not K.inside_closed(mid[0], mid[1], self.E, self.eps):
                return False
        return True

    # ---------------------------------------------------------- queries
    def locate(self, q) -> Location:
        return point_location(self.polygon, q, self.tol)

    def _check_in(self, q):
        if self.locate(q) is Location.OUTSIDE:
            raise InstanceError(f"point outside polygon: {tuple(np.asarray(q, float))}")

    def prepare(self, pts) -> Targets:
        P = np.ascontiguousarray(np.asarray(pts, float).reshape(-1, 2))
        if len(self.R) == 0:
            return Targets(P, np.zeros((len(P), 0)))
        D, _ = K.dist_matrix(P, self.E, self.R, self.R, self.Drr, self.eps)
        return Targets(P, np.ascontiguousarray(D))

    def distances(self, P, targets: Targets) -> np.ndarray:
        P = np.ascontiguousarray(np.asarray(P, float).reshape(-1, 2))
        D, _ = K.dist_matrix(P, self.E, self.R, targets.pts, targets.reflex_dist, self.eps)
        return D

    def distance(self, u, v) -> float:
        return float(self.distances([v], self.prepare([u]))[0, 0])

    def visible(self, p, q) -> bool:
        return bool(K.visible(float(p[0]), float(p[1]), float(q[0]), float(q[1]), self.E, self.eps))

    def _first_hop(self, p, a: int) -> list[int]:
        """Reflex indices of the shortest path from p to reflex vertex a."""
        vis = K.visible_many(float(p[0]), float(p[1]), self.R, self.E, self.eps)
        if vis[a]:
            return [a]
        dp = np.hypot(*(self.R - p).T)
        cand = np.where(vis, dp + self.Drr[:, a], np.inf)
        b = int(np.argmin(cand))
        if not np.isfinite(cand[b]):
            raise InstanceError("no path: point does not see any reflex vertex")
        seq = [a]
        j = a
        while j != b:
            j = int(self.pred[b, j])
            seq.append(j)
        return seq[::-1]

    def path(self, u, v) -> "GeodesicPath":
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        self._check_in(u)
        self._check_in(v)
        if np.array_equal(u, v):
            return GeodesicPath(u, v, np.array([u, v]), 0.0, ())
        tu = self.prepare([u])
        d = np.empty(1)
        a = np.empty(1, np.int64)
        K.dist_row(v[0], v[1], self.E, self.R, tu.pts, tu.reflex_dist, self.eps, d, a)
        if a[0] == -1:
            bends = []
        elif a[0] == -2:
            raise InstanceError("no path between the query points")
        else:
            bends = self._first_hop(u, int(a[0]))
        bends = self._split_grazing(u, v, list(bends))
        pts = np.vstack([u[None], self.R[bends].reshape(-1, 2), v[None]])
        length = float(np.sum(np.hypot(*np.diff(pts, axis=0).T)))
        return GeodesicPath(u, v, pts, length, tuple(int(self.reflex_idx[b]) for b in bends))

    def _split_grazing(self, u, v, bends):
        """Reflex vertices lying on a path segment become explicit bends."""
        if not len(self.R):
            return bends
        nodes = [u] + [self.R[b] for b in bends] + [v]
        out = []
        for k in range(len(nodes) - 1):
            a, d = nodes[k], nodes[k + 1] - nodes[k]
            L2 = float(d @ d)
            if L2 > 0:
                s = (self.R - a) @ d / L2
                off = np.abs(d[0] * (self.R[:, 1] - a[1]) - d[1] * (self.R[:, 0] - a[0])) / np.sqrt(L2)
                on = np.flatnonzero((s * np.sqrt(L2) > self.eps) & ((1 - s) * np.sqrt(L2) > self.eps)
                                    & (off <= self.eps))
                out += [int(r) for r in on[np.argsort(s[on])]]
            if k < len(bends):
                out.append(bends[k])
        return out

    def shoot(self, p, d) -> tuple[np.ndarray, float]:
        """First boundary hit of the ray p + s d (s > 0); returns point and boundary position."""
        E = self.E
        a = E[:, :2]
        e = E[:, 2:] - a
        den = d[0] * e[:, 1] - d[1] * e[:, 0]
        w = a - p
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (w[:, 0] * e[:, 1] - w[:, 1] * e[:, 0]) / den
            t = (w[:, 0] * d[1] - w[:, 1] * d[0]) / den
        L = float(np.hypot(*d))
        ok = (np.abs(den) > 0) & (s * L > self.eps) & (t >= -1e-12) & (t <= 1 + 1e-12)
        if not ok.any():
            raise GeneralPositionError("extension ray does not meet the boundary")
        s = np.where(ok, s, np.inf)
        i = int(np.argmin(s))
        tt = min(1.0, max(0.0, float(t[i])))
        hit = p + s[i] * d
        pos = i + tt
        if pos >= self.polygon.m:
            pos -= self.polygon.m
        return hit, pos


def build_engine(poly: Polygon, tol: float | None = None) -> Engine:
    return Engine(poly, tol)


@dataclass(frozen=True, eq=False)
class GeodesicPath:
    u: np.ndarray
    v: np.ndarray
    points: np.ndarray
    length: float
    bends: tuple = ()  # polygon vertex indices of the interior vertices

    def reversed(self) -> "GeodesicPath":
        return GeodesicPath(self.v, self.u, self.points[::-1].copy(), self.length, self.bends[::-1])

    def point_at(self, s: float) -> np.ndarray:
        """Point at arc length s from u."""
        seg = np.hypot(*np.diff(self.points, axis=0).T)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        s = min(max(s, 0.0), cum[-1])
        k = int(np.searchsorted(cum, s, side="right") - 1)
        k = min(k, len(seg) - 1)
        if seg[k] == 0:
            return self.points[k].copy()
        w = (s - cum[k]) / seg[k]
        return self.points[k] + w * (self.points[k + 1] - self.points[k])

    @property
    def midpoint(self) -> np.ndarray:
        return self.point_at(0.5 * self.length)


def geodesic_path(e: Engine, u, v) -> GeodesicPath:
    return e.path(u, v)


@dataclass(frozen=True, eq=False)
class ExtensionPath:
    base: GeodesicPath
    u_hat: np.ndarray
    v_hat: np.ndarray
    points: np.ndarray  # u_hat, u, ..., v, v_hat
    u_pos: float
    v_pos: float

    def left_polygon(self, poly: Polygon) -> np.ndarray:
        """Closed loop bounding the left half-polygon: the extension path
        followed by the counterclockwise boundary arc from v_hat to u_hat."""
        m = poly.m
        a, b = self.v_pos, self.u_pos
        if b > a:
            idx = [j for j in range(m) if a < j < b]
        else:
            idx = [j for j in range(m) if j > a] + [j for j in range(m) if j < b]
        return np.vstack([self.points, poly.vertices[idx].reshape(-1, 2)])


def _extend(e: Engine, p, toward) -> tuple[np.ndarray, float]:
    pos, dist = e.polygon.boundary_position(p)
    if dist <= e.tol:
        return np.asarray(p, float).copy(), pos
    d = np.asarray(p, float) - np.asarray(toward, float)
    hit, pos = e.shoot(np.asarray(p, float), d)
    # the prolongation must stay clear of reflex vertices
    if len(e.R):
        ab = hit - p
        L2 = float(ab @ ab)
        s = np.clip((e.R - p) @ ab / L2, 0.0, 1.0)
        dd = np.hypot(*(e.R - p - s[:, None] * ab).T)
        near = dd <= e.tol
        if near.any():
            k = int(e.reflex_idx[np.argmax(near)])
            raise GeneralPositionError(f"extension ray passes within tol of reflex vertex {k}")
    return hit, pos


def extension_path(e: Engine, u, v, path: GeodesicPath | None = None) -> ExtensionPath:
    g = path if path is not None else e.path(u, v)
    if g.length == 0:
        raise ValueError("extension path needs u != v")
    P = g.points
    uh, upos = _extend(e, P[0], P[1])
    vh, vpos = _extend(e, P[-1], P[-2])
    pts = np.vstack([uh[None], P, vh[None]])
    return ExtensionPath(g, uh, vh, pts, upos, vpos)


def _polyline_dist(L, Q):
    """Distance from each point of Q (k,2) to the polyline L."""
    a = L[:-1]
    ab = L[1:] - a
    L2 = np.einsum("ij,ij->i", ab, ab)
    L2 = np.where(L2 == 0, 1.0, L2)
    w = Q[:, None, :] - a[None]
    s = np.clip(np.einsum("kij,ij->ki", w, ab) / L2, 0.0, 1.0)
    r = w - s[..., None] * ab[None]
    return np.min(np.hypot(r[..., 0], r[..., 1]), axis=1)


def loop_contains(loop, Q) -> np.ndarray:
    """Even-odd containment of points Q in the closed loop."""
    Q = np.asarray(Q, float).reshape(-1, 2)
    x0, y0 = loop[:, 0], loop[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    qx, qy = Q[:, 0:1], Q[:, 1:2]
    straddle = (y0 > qy) != (y1 > qy)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = x0 + (qy - y0) * (x1 - x0) / (y1 - y0)
    return (np.count_nonzero(straddle & (qx < xint), axis=1) % 2) == 1


def sides(e: Engine, ext: ExtensionPath, Q, strict=True) -> np.ndarray:
    """+1 left, -1 right, 0 on the extension path (within tol) for each point."""
    Q = np.asarray(Q, float).reshape(-1, 2)
    out = np.where(loop_contains(ext.left_polygon(e.polygon), Q), 1, -1)
    on = _polyline_dist(ext.points, Q) <= e.tol
    # points on the polygon boundary: decide by boundary position
    for k, q in enumerate(Q):
        if on[k]:
            continue
        pos, dist = e.polygon.boundary_position(q)
        if dist <= e.tol:
            a, b = ext.v_pos, ext.u_pos
            left = (a < pos < b) if b > a else (pos > a or pos < b)
            out[k] = 1 if left else -1
    out[on] = 0
    if strict and on.any():
        k = int(np.argmax(on))
        raise GeneralPositionError(f"point {tuple(Q[k])} lies on the extension path")
    return out


def side_of_path(e: Engine, u, v, w) -> str:
    ext = extension_path(e, u, v)
    return "left" if sides(e, ext, [w])[0] > 0 else "right"


def paths_cross(e: Engine, g1: GeodesicPath, g2: GeodesicPath) -> bool:
    """True iff the endpoints of each path lie on opposite sides of the
    other's extension path."""
    ends1 = np.array([g1.u, g1.v])
    ends2 = np.array([g2.u, g2.v])
    s2 = sides(e, extension_path(e, g2.u, g2.v, g2), ends1)
    s1 = sides(e, extension_path(e, g1.u, g1.v, g1), ends2)
    return bool(s2[0] != s2[1] and s1[0] != s1[1])


# ---------------------------------------------------------------- cores

@dataclass(frozen=True, eq=False)
class GeodesicCore:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    vertices: np.ndarray  # a', b', c'
    sides: tuple  # polylines a'->b', b'->c', c'->a'
    angles: np.ndarray  # at a', b', c'

    @property
    def loop(self) -> np.ndarray:
        return np.vstack([s[:-1] for s in self.sides])


def _labels(g: GeodesicPath, start, end):
    return [start, *g.bends, end]


def _prefix(l1, l2) -> int:
    k = 0
    while k + 1 < min(len(l1), len(l2)) and l1[k + 1] == l2[k + 1]:
        k += 1
    return k


def _angle(p, q1, q2) -> float:
    d1 = q1 - p
    d2 = q2 - p
    n1, n2 = np.hypot(*d1), np.hypot(*d2)
    c = float(d1 @ d2) / (n1 * n2)
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def geodesic_core(e: Engine, a, b, c, paths=None) -> GeodesicCore:
    a, b, c = (np.asarray(x, float) for x in (a, b, c))
    if paths is None:
        paths = (e.path(a, b), e.path(b, c), e.path(c, a))
    gab, gbc, gca = paths
    P = {"ab": gab, "bc": gbc, "ca": gca, "ba": gab.reversed(), "cb": gbc.reversed(), "ac": gca.reversed()}
    lab = {k: _labels(g, "s" + k[0], "s" + k[1]) for k, g in P.items()}
    # index of the divergence vertex along each path out of each corner
    ia = _prefix(lab["ab"], lab["ac"])
    ib = _prefix(lab["bc"], lab["ba"])
    ic = _prefix(lab["ca"], lab["cb"])
    nab, nbc, nca = len(gab.points), len(gbc.points), len(gca.points)
    side_ab = gab.points[ia:nab - ib]
    side_bc = gbc.points[ib:nbc - ic]
    side_ca = gca.points[ic:nca - ia]
    for s in (side_ab, side_bc, side_ca):
        if len(s) < 2:
            raise DegenerateCoreError("degenerate core: two core vertices coincide")
    verts = np.array([side_ab[0], side_bc[0], side_ca[0]])
    for i in range(3):
        if np.hypot(*(verts[i] - verts[(i + 1) % 3])) <= e.tol:
            raise DegenerateCoreError("degenerate core: two core vertices coincide")
    ang = np.array([
        _angle(verts[0], side_ab[1], side_ca[-2]),
        _angle(verts[1], side_bc[1], side_ab[-2]),
        _angle(verts[2], side_ca[1], side_bc[-2]),
    ])
    return GeodesicCore(a, b, c, verts, (side_ab, side_bc, side_ca), ang)


def triangle_loop(paths) -> np.ndarray:
    """Closed loop g(a,b) + g(b,c) + g(c,a) bounding the geodesic triangle."""
    return np.vstack([g.points[:-1] for g in paths])


def in_geodesic_triangle(e: Engine, paths, Q) -> np.ndarray:
    """Points of Q inside the geodesic triangle; points on its boundary count."""
    loop = triangle_loop(paths)
    Q = np.asarray(Q, float).reshape(-1, 2)
    closed = np.vstack([loop, loop[:1]])
    return loop_contains(loop, Q) | (_polyline_dist(closed, Q) <= e.tol)


# ------------------------------------------------------- convex position

def convex_position_check(e: Engine, S) -> tuple[bool, list[int]]:
    """Geodesic hull by edge replacement from the Euclidean hull.

    Returns (all points on the hull boundary, hull order counterclockwise)."""
    S = np.asarray(S, float).reshape(-1, 2)
    n = len(S)
    if n <= 2:
        return True, list(range(n))
    cache: dict = {}

    def path(i, j):
        if (i, j) not in cache:
            if (j, i) in cache:
                cache[(i, j)] = cache[(j, i)].reversed()
            else:
                cache[(i, j)] = e.path(S[i], S[j])
        return cache[(i, j)]

    try:
        hull = [int(k) for k in ConvexHull(S).vertices]
    except Exception:  # all collinear
        order = np.lexsort((S[:, 1], S[:, 0]))
        hull = [int(order[0]), int(order[-1])]
    for _ in range(10 * n + 10):
        # drop hull points where the chain turns clockwise
        changed = True
        while changed and len(hull) > 3:
            changed = False
            for k in range(len(hull)):
                h0, h1, h2 = hull[k - 1], hull[k], hull[(k + 1) % len(hull)]
                gin, gout = path(h0, h1), path(h1, h2)
                din = gin.points[-1] - gin.points[-2]
                dout = gout.points[1] - gout.points[0]
                cr = (din[0] * dout[1] - din[1] * dout[0]) / (np.hypot(*din) * np.hypot(*dout))
                if cr < -1e-12:
                    hull.pop(k)
                    changed = True
                    break
        loop = triangle_loop([path(hull[k], hull[(k + 1) % len(hull)]) for k in range(len(hull))])
        rest = [k for k in range(n) if k not in hull]
        if not rest:
            break
        closed = np.vstack([loop, loop[:1]])
        inside = loop_contains(loop, S[rest]) | (_polyline_dist(closed, S[rest]) <= e.tol)
        outside = [q for q, f in zip(rest, inside) if not f]
        if not outside:
            break
        q = outside[0]
        best, at = np.inf, 0
        for k in range(len(hull)):
            h0, h1 = hull[k], hull[(k + 1) % len(hull)]
            detour = path(h0, q).length + path(q, h1).length - path(h0, h1).length
            if detour < best:
                best, at = detour, k
        hull.insert(at + 1, q)
    else:
        raise RuntimeError("geodesic hull iteration did not settle")
    on_chain = set(hull)
    if len(on_chain) < n:
        closed = np.vstack([loop, loop[:1]])
        rest = [k for k in range(n) if k not in on_chain]
        near = _polyline_dist(closed, S[rest]) <= e.tol
        on_chain |= {k for k, f in zip(rest, near) if f}
    return len(on_chain) == n, hull
