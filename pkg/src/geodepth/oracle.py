"""Brute-force checks that share no logic with the depth engine.

sampled_profile re-evaluates membership at densely sampled centers using only
distance queries; euclidean_reference works from closed forms; grid_distance
does not touch the engine at all."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .bisector import BisectorTrace, trace_bisector, trace_point
from .geodesic import Engine
from .polygon import InstanceError, Polygon


@dataclass(frozen=True, eq=False)
class OracleProfile:
    pair: tuple
    step: float
    t: np.ndarray
    counts: np.ndarray  # closed-disk counts per sample
    n: int

    @property
    def min_inside(self) -> int:
        return int(self.counts.min())

    @property
    def max_inside(self) -> int:
        return int(self.counts.max())

    @property
    def min_outside(self) -> int:
        return self.n - self.max_inside

    @property
    def max_outside(self) -> int:
        return self.n - self.min_inside

    def extrema(self) -> tuple:
        return self.min_inside, self.max_inside, self.min_outside, self.max_outside


def sampled_profile(e: Engine, u, v, S, step: float = 1e-3, trace: BisectorTrace | None = None) -> OracleProfile:
    """Closed-disk counts at centers sampled every `step` of the bisector's
    arc length, from raw distance queries."""
    S = np.asarray(S, float).reshape(-1, 2)
    iu = int(u) if np.ndim(u) == 0 else None
    iv = int(v) if np.ndim(v) == 0 else None
    pu = S[iu] if iu is not None else np.asarray(u, float)
    pv = S[iv] if iv is not None else np.asarray(v, float)
    if trace is None:
        trace = trace_bisector(e, pu, pv)
    k = int(np.ceil(1.0 / step))
    ts = np.linspace(0.0, 1.0, k + 1)
    C = np.array([trace_point(e, trace, t)[0] for t in ts])
    D = e.distances(C, e.prepare(np.vstack([pu, pv, S])))
    r = D[:, 0]
    inside = D[:, 2:] <= r[:, None]
    extra = 2
    for idx in (iu, iv):
        if idx is not None:
            inside[:, idx] = True
            extra -= 1
    counts = inside.sum(axis=1) + extra
    return OracleProfile((iu, iv) if iu is not None else (tuple(pu), tuple(pv)), step, ts, counts,
                         len(S) + extra)


# ------------------------------------------------------------- Euclidean

@dataclass(frozen=True, eq=False)
class EuclideanTransition:
    z: int
    t: float
    center: np.ndarray
    radius: float
    enters: bool


@dataclass(frozen=True, eq=False)
class EuclideanProfile:
    pair: tuple
    start: np.ndarray
    end: np.ndarray
    transitions: tuple
    count0: int
    min_inside: int
    max_inside: int
    n: int

    @property
    def min_outside(self) -> int:
        return self.n - self.max_inside

    @property
    def max_outside(self) -> int:
        return self.n - self.min_inside

    def extrema(self) -> tuple:
        return self.min_inside, self.max_inside, self.min_outside, self.max_outside


def _clip_line(poly: Polygon, m, d):
    """Parameter range of m + s d inside the convex polygon."""
    lo, hi = -np.inf, np.inf
    V = poly.vertices
    for a, b in zip(V, np.roll(V, -1, axis=0)):
        e = b - a
        nrm = np.array([e[1], -e[0]])  # outward for CCW order
        den = nrm @ d
        num = nrm @ (a - m)
        if abs(den) < 1e-300:
            if num < 0:
                return None
            continue
        s = num / den
        if den > 0:
            hi = min(hi, s)
        else:
            lo = max(lo, s)
    return lo, hi


def euclidean_reference(points, pair, polygon: Polygon | None = None, extent: float | None = None) -> EuclideanProfile:
    """Depth along the perpendicular bisector of the pair, from closed forms.

    Along c(s) = m + s n a point z is in the disk through the pair iff
    a s + b <= 0 with a = 2 n.(u - z) and b = |m - z|^2 - |m - u|^2.
    The line is clipped to the polygon (which must be convex), and oriented
    like an engine trace: t = 0 at the end met first walking the boundary
    counterclockwise from vertex 0."""
    P = np.asarray(points, float).reshape(-1, 2)
    i, j = pair
    u, v = P[i], P[j]
    m = 0.5 * (u + v)
    d = v - u
    nvec = np.array([-d[1], d[0]]) / np.hypot(*d)
    if polygon is not None:
        if polygon.reflex_mask.any():
            raise InstanceError("instance not in Euclidean regime: polygon is not convex")
        rng = _clip_line(polygon, m, nvec)
        if rng is None:
            raise InstanceError("instance not in Euclidean regime: bisector misses the polygon")
        s0, s1 = rng
        if polygon.boundary_position(m + s0 * nvec)[0] > polygon.boundary_position(m + s1 * nvec)[0]:
            nvec, s0, s1 = -nvec, -s1, -s0
    else:
        s1 = extent if extent is not None else 1e3 * np.ptp(P, axis=0).max()
        s0 = -s1
    L = s1 - s0
    du2 = float((m - u) @ (m - u))
    cnt0 = 0
    trans = []
    for k in range(len(P)):
        if k in (i, j):
            cnt0 += 1
            continue
        a = 2.0 * float(nvec @ (u - P[k]))
        b = float((m - P[k]) @ (m - P[k])) - du2
        inside0 = a * s0 + b <= 0
        cnt0 += inside0
        if a == 0.0:
            continue
        s = -b / a
        if s0 < s < s1:
            c = m + s * nvec
            trans.append(EuclideanTransition(k, (s - s0) / L, c, float(np.hypot(*(c - u))), a < 0))
    trans.sort(key=lambda tr: (tr.t, tr.z))
    c = lo = hi = cnt0
    for tr in trans:
        c += 1 if tr.enters else -1
        lo, hi = min(lo, c), max(hi, c)
    return EuclideanProfile((i, j), m + s0 * nvec, m + s1 * nvec, tuple(trans), cnt0, lo, hi, len(P))


def circumcenter(a, b, c) -> tuple[np.ndarray, float]:
    a, b, c = (np.asarray(x, float) for x in (a, b, c))
    d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    if d == 0.0:
        raise ValueError("collinear points have no circumcenter")
    a2, b2, c2 = a @ a, b @ b, c @ c
    ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d
    uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d
    cen = np.array([ux, uy])
    return cen, float(np.hypot(*(cen - a)))


# ------------------------------------------------------------------- grid

# 8 neighbours, knight moves, and (1,3)/(2,3) moves: 16 directions per half
# turn, so a straight run is overestimated by at most 1/cos(9.22 deg) ~ 1.3%
_MOVES = np.array([(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1), (1, -2),
                   (3, 1), (1, 3), (3, -1), (1, -3), (3, 2), (2, 3), (3, -2), (2, -3)])


def _segments_clear(A, B, V) -> np.ndarray:
    """Segments A[k]B[k] that neither cross nor touch any polygon edge."""
    ok = np.ones(len(A), bool)
    W = np.roll(V, -1, axis=0)

    def orient(p, q, r):
        return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])

    for a, b in zip(V, W):
        o1 = orient(A, B, a)
        o2 = orient(A, B, b)
        o3 = orient(a, b, A)
        o4 = orient(a, b, B)
        ok &= ~((o1 * o2 <= 0) & (o3 * o4 <= 0))
    return ok


def grid_distance(poly: Polygon, u, v, resolution: int = 400) -> float:
    """Shortest path on a grid graph restricted to the polygon interior.

    Every graph edge is a segment inside the polygon, so the value is the
    length of a feasible path and never undercuts the geodesic distance."""
    u, v = np.asarray(u, float), np.asarray(v, float)
    V = poly.vertices
    lo, hi = V.min(axis=0), V.max(axis=0)
    h = float((hi - lo).max()) / resolution
    nx = int(np.ceil((hi[0] - lo[0]) / h)) + 1
    ny = int(np.ceil((hi[1] - lo[1]) / h)) + 1
    gx, gy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    pts = lo + h * np.c_[gx.ravel(), gy.ravel()] + 0.5 * h * np.array([1e-3, 2e-3])
    inside = _inside_many(poly, pts, 1e-9 * h)
    idx = -np.ones(nx * ny, np.int64)
    node = np.flatnonzero(inside)
    idx[node] = np.arange(len(node))
    P = pts[node]
    gi, gj = gx.ravel()[node], gy.ravel()[node]
    # nodes near the boundary need a crossing test; deep nodes do not
    near = _near_boundary(poly, P, 4.0 * h)
    rows, cols, wts = [], [], []
    for dx, dy in _MOVES:
        ti, tj = gi + dx, gj + dy
        okk = (ti >= 0) & (ti < nx) & (tj >= 0) & (tj < ny)
        src = np.flatnonzero(okk)
        tgt = idx[ti[src] * ny + tj[src]]
        keep = tgt >= 0
        src, tgt = src[keep], tgt[keep]
        test = near[src] | near[tgt]
        clear = np.ones(len(src), bool)
        if test.any():
            clear[test] = _segments_clear(P[src[test]], P[tgt[test]], V)
        src, tgt = src[clear], tgt[clear]
        rows.append(src)
        cols.append(tgt)
        wts.append(np.full(len(src), h * np.hypot(dx, dy)))
    N = len(P)
    # attach u and v to every clear node within a few cells
    for k, q in enumerate((u, v)):
        d = np.hypot(*(P - q).T)
        cand = np.flatnonzero(d <= 4.0 * h)
        clear = _segments_clear(np.repeat(q[None], len(cand), 0), P[cand], V)
        cand = cand[clear]
        rows.append(np.full(len(cand), N + k))
        cols.append(cand)
        wts.append(d[cand])
    G = coo_matrix((np.concatenate(wts), (np.concatenate(rows), np.concatenate(cols))), shape=(N + 2, N + 2))
    dist = dijkstra(G.tocsr(), directed=False, indices=N)
    val = float(dist[N + 1])
    if not np.isfinite(val):
        raise InstanceError("grid too coarse to connect the two points")
    return val


def _inside_many(poly: Polygon, Q, tol) -> np.ndarray:
    """Strict interior by even-odd crossing, with a boundary band excluded."""
    V = poly.vertices
    W = np.roll(V, -1, axis=0)
    x, y = Q[:, 0:1], Q[:, 1:2]
    straddle = (V[None, :, 1] > y) != (W[None, :, 1] > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = V[None, :, 0] + (y - V[None, :, 1]) * (W[None, :, 0] - V[None, :, 0]) / (W[None, :, 1] - V[None, :, 1])
    inside = (np.count_nonzero(straddle & (x < xint), axis=1) % 2) == 1
    return inside & ~_near_boundary(poly, Q, tol)


def _near_boundary(poly: Polygon, Q, r) -> np.ndarray:
    V = poly.vertices
    W = np.roll(V, -1, axis=0)
    out = np.zeros(len(Q), bool)
    for a, b in zip(V, W):
        ab = b - a
        s = np.clip((Q - a) @ ab / (ab @ ab), 0.0, 1.0)
        out |= np.hypot(*(Q - a - s[:, None] * ab).T) <= r
    return out

