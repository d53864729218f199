"""Bisector tracing, membership transitions along it, and disk depth profiles."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .geodesic import Engine, GeneralPositionError, Targets, extension_path, in_geodesic_triangle, sides

TRACE_DIVISIONS = 512
SCAN_SAMPLES = 2048
T_TOL = 1e-8


class BisectorError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class BisectorTrace:
    u: np.ndarray
    v: np.ndarray
    t: np.ndarray  # normalized arc length, t[0] = 0, t[-1] = 1
    points: np.ndarray
    radius: np.ndarray
    length: float
    pair_targets: Targets  # u and v prepared for kernel queries

    @property
    def start(self) -> np.ndarray:
        return self.points[0]

    @property
    def end(self) -> np.ndarray:
        return self.points[-1]

    def to_dict(self) -> dict:
        return {
            "u": self.u.tolist(), "v": self.v.tolist(), "length": self.length,
            "samples": [[float(t), float(x), float(y), float(r)]
                        for t, (x, y), r in zip(self.t, self.points, self.radius)],
        }


@dataclass(frozen=True)
class Transition:
    z: int
    t: float
    enters: bool  # z enters the disk as t increases
    multiple: bool = False  # z has more than one transition (fallback)

    @property
    def direction(self) -> str:
        return "enters-as-t-increases" if self.enters else "exits-as-t-increases"


@dataclass(frozen=True, eq=False)
class DepthProfile:
    pair: tuple
    n: int
    transitions: tuple
    count0: int
    min_inside: int
    max_inside: int
    inside0: np.ndarray = field(repr=False)

    @property
    def min_outside(self) -> int:
        return self.n - self.max_inside

    @property
    def max_outside(self) -> int:
        return self.n - self.min_inside

    @property
    def fallback(self) -> bool:
        return any(tr.multiple for tr in self.transitions)

    def depth_at(self, t: float) -> int:
        c = self.count0
        for tr in self.transitions:
            if tr.t > t:
                break
            c += 1 if tr.enters else -1
        return c

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair), "count_t0": self.count0,
            "min_inside": self.min_inside, "max_inside": self.max_inside,
            "min_outside": self.min_outside, "max_outside": self.max_outside,
            "transitions": [{"z": tr.z, "t": round(tr.t, 12), "direction": tr.direction,
                             "multiple": tr.multiple} for tr in self.transitions],
        }


@dataclass(frozen=True, eq=False)
class DiskSpec:
    center: np.ndarray
    radius: float
    defining: tuple  # indices (or points) on the boundary


@dataclass(frozen=True, eq=False)
class EnclosingDiskResult:
    kind: str
    disk: DiskSpec
    witnesses: tuple
    steps: int = 0


THREE = "three-on-boundary-center-in-triangle"
DIAMETRAL = "diametral-pair"
ALL_PAIR = "all-disks-enclosing-pair"


def _ftol(e: Engine) -> float:
    return 1e-12 * e.diameter


# ------------------------------------------------------------- endpoints

def _scan_grid(e: Engine, samples=SCAN_SAMPLES):
    """Boundary samples shared by every pair, with their geodesic distances
    to the reflex vertices.  Cached on the engine."""
    g = getattr(e, "_scan_grid", None)
    if g is not None and g[0] == samples:
        return g[1:]
    E = e.E
    lens = np.hypot(E[:, 2] - E[:, 0], E[:, 3] - E[:, 1])
    h = lens.sum() / samples
    pos, P = [], []
    for i in range(e.polygon.m):
        k = max(2, int(np.ceil(lens[i] / h)))
        s = np.arange(k) / k
        pos.append(i + s)
        P.append(E[i, :2] + s[:, None] * (E[i, 2:] - E[i, :2]))
    pos = np.concatenate(pos)
    P = np.ascontiguousarray(np.vstack(P))
    PR = e.prepare(P).reflex_dist
    e._scan_grid = (samples, pos, P, PR)
    return pos, P, PR


def _scan(e: Engine, pt: Targets, samples=SCAN_SAMPLES):
    pos, P, PR = _scan_grid(e, samples)
    D = K.dist_matrix_via(P, PR, e.E, pt.pts, pt.reflex_dist, e.eps)
    return pos, P, D[:, 0] - D[:, 1]


def _endpoints(e: Engine, pt: Targets):
    pos, P, f = _scan(e, pt)
    pos_sign = f > 0
    nxt = np.roll(pos_sign, -1)
    ks = np.flatnonzero(pos_sign != nxt)
    if len(ks) != 2:
        raise BisectorError(f"bisector meets the boundary {len(ks)} times (expected 2)")
    out = []
    E = e.E
    for k in ks:
        i = int(np.floor(pos[k]))
        s_lo = pos[k] - i
        s_hi = pos[(k + 1) % len(pos)] - i
        if s_hi <= s_lo:  # next sample is the start of the next edge
            s_hi = 1.0
        x0, y0, x1, y1 = E[i]
        s = K.boundary_root(x0, y0, x1, y1, s_lo, s_hi, bool(pos_sign[k]), E, e.R,
                            pt.pts, pt.reflex_dist, e.eps, 200)
        out.append((i + s, np.array([x0 + s * (x1 - x0), y0 + s * (y1 - y0)])))
    out.sort(key=lambda r: r[0])
    return out


def bisector_endpoints(e: Engine, u, v) -> tuple[np.ndarray, np.ndarray]:
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    if np.array_equal(u, v):
        raise ValueError("bisector needs u != v")
    (_, A), (_, B) = _endpoints(e, e.prepare([u, v]))
    return A, B


# --------------------------------------------------------------- tracing

def trace_bisector(e: Engine, u, v, step: float | None = None, pair_targets: Targets | None = None) -> BisectorTrace:
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    if np.array_equal(u, v):
        raise ValueError("bisector needs u != v")
    pt = pair_targets if pair_targets is not None else e.prepare([u, v])
    (_, A), (_, B) = _endpoints(e, pt)
    cm = e.path(u, v).midpoint
    est = np.hypot(*(A - cm)) + np.hypot(*(cm - B))
    h0 = step if step is not None else est / TRACE_DIVISIONS
    max_samples = int(40 * est / h0) + 1000
    pts, rad, cnt, status, fx, fy = K.march(A[0], A[1], B[0], B[1], h0, e.E, e.R, pt.pts,
                                            pt.reflex_dist, e.eps, _ftol(e), max_samples)
    if status != K.OK:
        why = {K.STALL: "trace stalled (step underflow)", K.CORRECTOR_FAIL: "corrector failed to converge",
               K.OVERFLOW: "trace exceeded its sample budget", K.NO_START: "no tangent at start"}[status]
        raise BisectorError(f"{why} near ({fx:.9g}, {fy:.9g})")
    pts = pts[:cnt].copy()
    rad = rad[:cnt].copy()
    seg = np.hypot(*np.diff(pts, axis=0).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    L = float(cum[-1])
    return BisectorTrace(u, v, cum / L, pts, rad, L, pt)


def trace_point(e: Engine, trace: BisectorTrace, t: float) -> tuple[np.ndarray, float]:
    """Center on the bisector at parameter t and its radius."""
    bd = np.empty(2)
    ba = np.empty(2, np.int64)
    pt = trace.pair_targets
    x, y, r = K.trace_point(float(t), trace.t, trace.points, e.E, e.R, pt.pts, pt.reflex_dist,
                            e.eps, _ftol(e), bd, ba)
    return np.array([x, y]), float(r)


def locate_on_trace(trace: BisectorTrace, c) -> float:
    """Parameter of the trace point nearest to c."""
    P = trace.points
    a, ab = P[:-1], np.diff(P, axis=0)
    L2 = np.einsum("ij,ij->i", ab, ab)
    L2 = np.where(L2 == 0, 1.0, L2)
    s = np.clip(np.einsum("ij,ij->i", c - a, ab) / L2, 0.0, 1.0)
    d = np.hypot(*(a + s[:, None] * ab - c).T)
    k = int(np.argmin(d))
    return float(trace.t[k] + s[k] * (trace.t[k + 1] - trace.t[k]))


# ----------------------------------------------------------- transitions

def _membership(e: Engine, trace: BisectorTrace, Z: Targets, force=()):
    D, _ = K.dist_matrix(trace.points, e.E, e.R, Z.pts, Z.reflex_dist, e.eps)
    inside = D <= trace.radius[:, None]
    for k in force:
        inside[:, k] = True
    return inside


def _transitions(e: Engine, trace: BisectorTrace, Z: Targets, force=(), ttol=T_TOL) -> tuple[list, np.ndarray]:
    inside = _membership(e, trace, Z, force)
    flips = np.argwhere(inside[:-1] != inside[1:])  # rows: sample k, point z
    if len(flips) == 0:
        return [], inside[0]
    ks, zs = flips[:, 0], flips[:, 1]
    br = np.column_stack([zs, trace.t[ks], trace.t[ks + 1], inside[ks, zs]]).astype(float)
    pt = trace.pair_targets
    ts = K.refine_roots(np.ascontiguousarray(br), trace.t, trace.points, Z.pts, Z.reflex_dist,
                        e.E, e.R, pt.pts, pt.reflex_dist, e.eps, _ftol(e), ttol)
    counts = np.bincount(zs, minlength=len(Z.pts))
    out = [Transition(int(z), float(t), not bool(inside[k, z]), bool(counts[z] > 1))
           for k, z, t in zip(ks, zs, ts)]
    out.sort(key=lambda tr: (tr.t, tr.z))
    return out, inside[0]


def point_transitions(e: Engine, trace: BisectorTrace, z) -> list[Transition]:
    """Transitions of a single point z (reported with index 0)."""
    z = np.asarray(z, float).reshape(1, 2)
    force = (0,) if (np.array_equal(z[0], trace.u) or np.array_equal(z[0], trace.v)) else ()
    tr, _ = _transitions(e, trace, e.prepare(z), force)
    return tr


def _profile(pair, n, trans, inside0) -> DepthProfile:
    c = int(np.count_nonzero(inside0))
    lo = hi = c
    for tr in trans:
        c += 1 if tr.enters else -1
        lo = min(lo, c)
        hi = max(hi, c)
    return DepthProfile(tuple(pair), n, tuple(trans), int(np.count_nonzero(inside0)), lo, hi, inside0)


def profile_from_trace(e: Engine, trace: BisectorTrace, Z: Targets, pair: tuple) -> DepthProfile:
    """Depth profile of the pair (indices into Z) along a computed trace."""
    trans, inside0 = _transitions(e, trace, Z, force=pair)
    return _profile(pair, len(Z.pts), trans, inside0)


def restrict_profile(prof: DepthProfile, subset) -> DepthProfile:
    """The same profile counted over a subset of point indices (which must hold the pair)."""
    keep = set(int(k) for k in subset)
    trans = [tr for tr in prof.transitions if tr.z in keep]
    inside0 = np.zeros_like(prof.inside0)
    idx = np.array(sorted(keep))
    inside0[idx] = prof.inside0[idx]
    p = _profile(prof.pair, len(keep), trans, inside0)
    return p


def depth_profile(e: Engine, u, v, S, trace: BisectorTrace | None = None) -> DepthProfile:
    """Profile of the pair (u, v) against the point set S.

    u and v may be indices into S or coordinates; coordinates not in S are
    appended so that the defining points always count."""
    S = np.asarray(S, float).reshape(-1, 2)
    iu, S = _index_of(u, S)
    iv, S = _index_of(v, S)
    Z = e.prepare(S)
    if trace is None:
        trace = trace_bisector(e, S[iu], S[iv], pair_targets=Z.take([iu, iv]))
    return profile_from_trace(e, trace, Z, (iu, iv))


def _index_of(p, S):
    if np.ndim(p) == 0:
        return int(p), S
    p = np.asarray(p, float)
    hit = np.flatnonzero(np.all(S == p, axis=1))
    if len(hit):
        return int(hit[0]), S
    return len(S), np.vstack([S, p[None]])


def diametral_depth(e: Engine, u, v, S, Z: Targets | None = None) -> int:
    S = np.asarray(S, float).reshape(-1, 2)
    iu, S = _index_of(u, S)
    iv, S = _index_of(v, S)
    g = e.path(S[iu], S[iv])
    if Z is None or len(Z.pts) != len(S):
        Z = e.prepare(S)
    d = e.distances([g.midpoint], Z)[0]
    inside = d <= 0.5 * g.length + e.tol
    inside[[iu, iv]] = True
    return int(np.count_nonzero(inside))


def disk_through_three(e: Engine, p, q, z, trace: BisectorTrace | None = None) -> DiskSpec | None:
    p, q, z = (np.asarray(x, float) for x in (p, q, z))
    if trace is None:
        trace = trace_bisector(e, p, q)
    Zt = e.prepare([z])
    trans, inside0 = _transitions(e, trace, Zt, ttol=1e-14)
    if trans:
        t = trans[0].t
    else:
        # roots sitting on a trace endpoint count as limiting disks
        D = e.distances(trace.points[[0, -1]], Zt)[:, 0] - trace.radius[[0, -1]]
        near = np.abs(D) <= e.tol
        if not near.any():
            return None
        t = 0.0 if near[0] else 1.0
    c, r = trace_point(e, trace, t)
    return DiskSpec(c, r, (p, q, z))


# ---------------------------------------------------------- enclosing disk

class CycleError(RuntimeError):
    pass


class PairCache:
    """Caller-owned store of traces and profiles for one point set.

    The engine keeps no state between queries; whoever wants traces reused
    across reports and validation passes one of these around."""

    def __init__(self, e: Engine, S, store: dict | None = None):
        self.e = e
        self.S = np.ascontiguousarray(np.asarray(S, float).reshape(-1, 2))
        self.Z = e.prepare(self.S)
        store = {} if store is None else store
        self.traces = store.setdefault("traces", {})
        self.profiles = store.setdefault("profiles", {})

    def trace(self, i: int, j: int) -> BisectorTrace:
        key = (min(i, j), max(i, j))
        if key not in self.traces:
            a, b = key
            self.traces[key] = trace_bisector(self.e, self.S[a], self.S[b], pair_targets=self.Z.take([a, b]))
        return self.traces[key]

    def profile(self, i: int, j: int) -> DepthProfile:
        key = (min(i, j), max(i, j))
        if key not in self.profiles:
            self.profiles[key] = profile_from_trace(self.e, self.trace(*key), self.Z, key)
        return self.profiles[key]


def _walk(prof: DepthProfile, t0: float, forward: bool, ignore=(), t_stop=None):
    """First transition met when moving from t0 that drops a point out of the disk."""
    events = prof.transitions if forward else prof.transitions[::-1]
    for tr in events:
        if tr.z in ignore and abs(tr.t - t0) < 1e-6:
            continue
        if forward and tr.t <= t0:
            continue
        if not forward and tr.t >= t0:
            continue
        if t_stop is not None and (tr.t > t_stop if forward else tr.t < t_stop):
            return None
        exits = (not tr.enters) if forward else tr.enters
        if exits:
            return tr
    return None


def _sharp_point(e: Engine, trace: BisectorTrace, Zk: Targets, t: float, width: float = 10 * T_TOL):
    """Center and radius at a transition of one target, refined to ttol 1e-14."""
    lo, hi = max(0.0, t - width), min(1.0, t + width)
    ends = []
    for s in (lo, hi):
        c, r = trace_point(e, trace, s)
        ends.append(e.distances([c], Zk)[0, 0] <= r)
    if ends[0] == ends[1]:
        return trace_point(e, trace, t)
    pt = trace.pair_targets
    br = np.array([[0.0, lo, hi, 1.0 if ends[0] else 0.0]])
    ts = K.refine_roots(br, trace.t, trace.points, Zk.pts, Zk.reflex_dist, e.E, e.R,
                        pt.pts, pt.reflex_dist, e.eps, _ftol(e), 1e-14)
    return trace_point(e, trace, float(ts[0]))


def enclosing_disk(e: Engine, S, x: int = 0, cache: PairCache | None = None) -> EnclosingDiskResult:
    """Enclosing geodesic disk whose center is either inside the geodesic
    triangle of three boundary points, or the midpoint of a pair."""
    S = np.asarray(S, float).reshape(-1, 2)
    n = len(S)
    if n < 2:
        raise ValueError("need at least two points")
    T = cache if cache is not None else PairCache(e, S)
    Z = T.Z

    def diametral(a, b, kind, steps):
        g = e.path(S[a], S[b])
        return EnclosingDiskResult(kind, DiskSpec(g.midpoint, 0.5 * g.length, (a, b)), (a, b), steps)

    # shrink D(x) along g(x, y)
    d0 = e.distances([S[x]], Z)[0]
    y = int(np.argmax(d0))
    g = e.path(S[x], S[y])
    L = g.length
    others = [k for k in range(n) if k != y]

    def gap(lam):
        dd = e.distances([g.point_at(lam)], Z)[0]
        return float(np.max(dd[others]) - (L - lam)), int(others[int(np.argmax(dd[others]))])

    lams = np.linspace(0.0, 0.5 * L, 129)
    lo = 0.0
    val, z = gap(0.0)
    if val < -e.tol:
        for lam in lams[1:]:
            val, z = gap(lam)
            if val >= -e.tol:
                hi = lam
                break
            lo = lam
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            v_mid, z_mid = gap(mid)
            if v_mid >= 0:
                hi, z = mid, z_mid
            else:
                lo = mid
        lam = hi
    else:
        lam = 0.0
    if z == x and lam >= 0.5 * L - 1e-9 * L:
        return diametral(x, y, DIAMETRAL, 0)
    c = g.point_at(lam)

    # slide along b(y, z) to a third boundary point
    tr = T.trace(y, z)
    prof = T.profile(y, z)
    t0 = locate_on_trace(tr, c)
    hit_f = _walk(prof, t0, True)
    hit_b = _walk(prof, t0, False)
    if hit_f is None and hit_b is None:
        return diametral(y, z, ALL_PAIR, 0)
    hit = hit_f if hit_f is not None else hit_b
    a, b, w = y, z, hit.z
    c, r = _sharp_point(e, tr, Z.take([w]), hit.t)

    seen = set()
    for step in range(1, 4 * n * n + 10):
        key = tuple(sorted((a, b, w)))
        if key in seen:
            raise CycleError(f"enclosing-disk walk revisited triple {key}")
        seen.add(key)
        trio = (a, b, w)
        paths = [e.path(S[trio[i]], S[trio[(i + 1) % 3]]) for i in range(3)]
        if in_geodesic_triangle(e, paths, c[None])[0]:
            return EnclosingDiskResult(THREE, DiskSpec(c, r, trio), trio, step)
        # the pair whose far side holds the center
        pick = None
        for i in range(3):
            p1, p2, p3 = trio[i], trio[(i + 1) % 3], trio[(i + 2) % 3]
            ext = extension_path(e, S[p1], S[p2], paths[i])
            sd = sides(e, ext, np.array([c, S[p3]]), strict=False)
            if sd[0] != 0 and sd[0] != sd[1]:
                pick = (p1, p2, p3)
                break
        if pick is None:
            raise GeneralPositionError("center lies on an extension path of its defining points")
        p1, p2, p3 = pick
        tr = T.trace(p1, p2)
        prof = T.profile(p1, p2)
        tc = locate_on_trace(tr, c)
        tm = locate_on_trace(tr, e.path(S[p1], S[p2]).midpoint)
        hit = _walk(prof, tc, tm > tc, ignore=(p3,), t_stop=tm)
        if hit is None:
            return diametral(p1, p2, DIAMETRAL, step)
        a, b, w = p1, p2, hit.z
        c, r = _sharp_point(e, tr, Z.take([w]), hit.t)
    raise CycleError("enclosing-disk walk did not terminate")
