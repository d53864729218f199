"""Instance-level depth quantities and the lemma / theorem checks built on them."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .bisector import (ALL_PAIR, DIAMETRAL, THREE, EnclosingDiskResult, PairCache, diametral_depth,
                       restrict_profile, trace_point)
from .geodesic import (DegenerateCoreError, Engine, GeneralPositionError, _angle, build_engine, extension_path,
                       geodesic_core, in_geodesic_triangle, sides)
from .polygon import Instance

VARIANTS = ("pi", "pi_in_out", "pi_diam", "pi_bichrom", "pi_bichrom_in_out", "pi_convex")


def _g12(x: float) -> float:
    return float(f"{x:.12g}")


@dataclass(frozen=True)
class PairRow:
    u: int
    v: int
    min_in: int
    max_in: int
    min_out: int
    diam: int


@dataclass(frozen=True)
class VariantValue:
    value: int | None
    witness: tuple | None


@dataclass
class BoundsReport:
    n: int
    variants: dict
    rows: list
    convex: bool = False
    colored: bool = False
    meta: dict = field(default_factory=dict)

    def __getattr__(self, name):
        if name in VARIANTS:
            return self.variants[name].value
        raise AttributeError(name)

    def row(self, i: int, j: int) -> PairRow:
        a, b = min(i, j), max(i, j)
        for r in self.rows:
            if (r.u, r.v) == (a, b):
                return r
        raise KeyError((i, j))

    def ordering_ok(self) -> bool:
        return not ordering_violations(self)

    def to_dict(self) -> dict:
        return {
            "n": self.n, "convex": self.convex, "colored": self.colored,
            **{k: v.value for k, v in self.variants.items()},
            "witnesses": {k: (list(v.witness) if v.witness else None) for k, v in self.variants.items()},
            "max_bichromatic_min_inside": self.variants["pi_bichrom"].value,
            "pairs": [[r.u, r.v, r.min_in, r.max_in, r.min_out, r.diam] for r in self.rows],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["pair_u", "pair_v", "min_in", "max_in", "min_out", "diam"])
        for r in self.rows:
            w.writerow([r.u, r.v, r.min_in, r.max_in, r.min_out, r.diam])
        return buf.getvalue()


def _best(rows, key, allowed=None) -> VariantValue:
    best, wit = None, None
    for r in rows:
        if allowed is not None and (r.u, r.v) not in allowed:
            continue
        val = key(r)
        if best is None or val > best:
            best, wit = val, (r.u, r.v)
    return VariantValue(best, wit)


def bounds_report(inst: Instance, engine: Engine | None = None, cache: PairCache | None = None) -> BoundsReport:
    """All variant values from the depth profiles of every pair (closed disks,
    defining points counted)."""
    e = engine if engine is not None else build_engine(inst.polygon)
    T = cache if cache is not None else PairCache(e, inst.points)
    n = inst.n
    rows = []
    for i, j in combinations(range(n), 2):
        p = T.profile(i, j)
        rows.append(PairRow(i, j, p.min_inside, p.max_inside, p.min_outside,
                            diametral_depth(e, i, j, inst.points, T.Z)))
    V = {
        "pi": _best(rows, lambda r: r.min_in),
        "pi_in_out": _best(rows, lambda r: min(r.min_in, r.min_out)),
        "pi_diam": _best(rows, lambda r: r.diam),
    }
    if inst.colored:
        rb = {(min(a, b), max(a, b)) for a, b in inst.red_blue_pairs()}
        V["pi_bichrom"] = _best(rows, lambda r: r.min_in, rb)
        V["pi_bichrom_in_out"] = _best(rows, lambda r: min(r.min_in, r.min_out), rb)
    else:
        V["pi_bichrom"] = V["pi_bichrom_in_out"] = VariantValue(None, None)
    V["pi_convex"] = V["pi"] if inst.convex else VariantValue(None, None)
    return BoundsReport(n, V, rows, inst.convex, inst.colored, dict(inst.meta))


def ordering_violations(rep: BoundsReport) -> list[str]:
    out = []
    v = {k: rep.variants[k].value for k in VARIANTS}
    if not v["pi_in_out"] <= v["pi"] <= v["pi_diam"]:
        out.append(f"pi_in_out {v['pi_in_out']} <= pi {v['pi']} <= pi_diam {v['pi_diam']}")
    if v["pi_bichrom"] is not None:
        if not v["pi_bichrom"] <= v["pi"]:
            out.append(f"pi_bichrom {v['pi_bichrom']} <= pi {v['pi']}")
        if not v["pi_bichrom_in_out"] <= v["pi_bichrom"]:
            out.append(f"pi_bichrom_in_out {v['pi_bichrom_in_out']} <= pi_bichrom {v['pi_bichrom']}")
    return out


# ----------------------------------------------------------- crossings

def side_matrix(e: Engine, S, pairs=None) -> dict:
    """Side (+1 left / -1 right / 0 on) of every point of S with respect to the
    extension path of each pair."""
    S = np.asarray(S, float).reshape(-1, 2)
    pairs = list(combinations(range(len(S)), 2)) if pairs is None else pairs
    out = {}
    for i, j in pairs:
        ext = extension_path(e, S[i], S[j])
        sd = sides(e, ext, S, strict=False)
        sd[[i, j]] = 0
        out[i, j] = sd
    return out


def _crosses(sm, a, b, c, d) -> bool:
    s1 = sm[min(a, b), max(a, b)]
    s2 = sm[min(c, d), max(c, d)]
    return bool(s1[c] * s1[d] < 0 and s2[a] * s2[b] < 0)


def crossing_pairs(e: Engine, S, sm=None) -> list[tuple]:
    """Unordered pairs of vertex-disjoint crossing geodesics, as (a, b, c, d)."""
    S = np.asarray(S, float).reshape(-1, 2)
    sm = side_matrix(e, S) if sm is None else sm
    out = []
    for quad in combinations(range(len(S)), 4):
        a, b, c, d = quad
        for p1, p2 in (((a, b), (c, d)), ((a, c), (b, d)), ((a, d), (b, c))):
            if _crosses(sm, *p1, *p2):
                out.append((*p1, *p2))
    return out


def intersection_number(e: Engine, S, sm=None) -> int:
    return len(crossing_pairs(e, S, sm))


def intersection_lower_bound(n: int) -> float:
    return math.comb(n, 5) / (n - 4) if n > 4 else 0.0


# ------------------------------------------------------ dominating pairs

def _cache_for(e, S, cache):
    if cache is not None:
        return cache
    return PairCache(e, S)


def dominating_pairs(e: Engine, S, variant: str = "inside", subset=None, cache: PairCache | None = None) -> int:
    """Pairs of the subset whose every disk contains (inside) or leaves out
    (outside) some other point of the subset."""
    if variant not in ("inside", "outside"):
        raise ValueError("variant must be 'inside' or 'outside'")
    T = _cache_for(e, S, cache)
    sub = sorted(range(len(T.S))) if subset is None else sorted(int(k) for k in subset)
    k = len(sub)
    if k < 4:
        raise ValueError("dominating pairs need k >= 4")
    cnt = 0
    for i, j in combinations(sub, 2):
        p = restrict_profile(T.profile(i, j), sub)
        if variant == "inside" and p.min_inside >= 3:
            cnt += 1
        if variant == "outside" and p.max_inside <= k - 1:
            cnt += 1
    return cnt


def dominating_bound(k: int) -> int:
    return math.comb(k - 3, 2) if k >= 5 else 0


# ----------------------------------------------------------- quadrilateral

@dataclass(frozen=True)
class QuadResult:
    contain: str | None  # case-uv / case-pq / both: whose disks all hold an endpoint of the other
    exclude: str | None  # likewise for leaving out an endpoint of the other

    @property
    def ok(self) -> bool:
        return self.contain is not None and self.exclude is not None


def _case(a: bool, b: bool) -> str | None:
    return "both" if a and b else "case-uv" if a else "case-pq" if b else None


def check_quadrilateral(e: Engine, u, v, p, q, cache: PairCache | None = None, sm=None) -> QuadResult:
    """Containment and exclusion cases for crossing geodesics g(u,v), g(p,q).

    With a cache the four arguments are indices into cache.S; otherwise points."""
    if cache is None:
        T = PairCache(e, np.array([u, v, p, q], float))
        iu, iv, ip, iq = 0, 1, 2, 3
    else:
        T = cache
        iu, iv, ip, iq = (int(x) for x in (u, v, p, q))
    quad = (iu, iv, ip, iq)
    if len(set(quad)) != 4:
        raise ValueError("the four points must be distinct")
    if sm is None:
        sm = side_matrix(e, T.S, [(min(iu, iv), max(iu, iv)), (min(ip, iq), max(ip, iq))])
    if not _crosses(sm, iu, iv, ip, iq):
        raise ValueError("precondition violated: g(u,v) and g(p,q) do not cross")
    puv = restrict_profile(T.profile(iu, iv), quad)
    ppq = restrict_profile(T.profile(ip, iq), quad)
    contain = _case(puv.min_inside >= 3, ppq.min_inside >= 3)
    exclude = _case(puv.max_inside <= 3, ppq.max_inside <= 3)
    return QuadResult(contain, exclude)


# -------------------------------------------------------- triangle lemmas

@dataclass(frozen=True)
class TriangleResult:
    angle: float  # core angle at v'
    v_is_core_vertex: bool
    geq_applies: bool
    geq_ok: bool
    leq_applies: bool
    leq_ok: bool
    lengths: tuple  # |g(u,v)|, |g(v,w)|, |g(u,w)|, |uw|
    euclid_angle: float = math.nan  # angle uvw of the straight triangle


def check_triangle_lemmas(e: Engine, u, v, w) -> TriangleResult:
    u, v, w = (np.asarray(x, float) for x in (u, v, w))
    guv, gvw, gwu = e.path(u, v), e.path(v, w), e.path(w, u)
    core = geodesic_core(e, u, v, w, (guv, gvw, gwu))
    ang = float(core.angles[1])
    at_v = bool(np.hypot(*(core.vertices[1] - v)) <= e.tol)
    a, b, c = guv.length, gvw.length, gwu.length
    uw = float(np.hypot(*(u - w)))
    tol = e.tol
    geq_applies = at_v and ang >= math.pi / 3
    leq_applies = ang <= math.pi / 3
    return TriangleResult(
        ang, at_v,
        geq_applies, (not geq_applies) or c >= min(a, b) - tol,
        leq_applies, (not leq_applies) or uw <= max(a, b) + tol,
        (a, b, c, uw), _angle(v, u, w))


# ------------------------------------------------------- disk containment

def check_disk_containment(e: Engine, trace, p, q, t1: float, t2: float, X) -> tuple[bool, int, int]:
    """With D, D' the disks through p, q centered at trace(t1), trace(t2):
    if c' is left of the extension of g(p, c), every sample of X in D and
    left of g(p, q) must lie in D'.

    Returns (hypothesis holds, samples tested, samples failing)."""
    p, q = np.asarray(p, float), np.asarray(q, float)
    c, r = trace_point(e, trace, t1)
    c2, r2 = trace_point(e, trace, t2)
    try:
        s = sides(e, extension_path(e, p, c), c2[None])[0]
    except GeneralPositionError:
        return False, 0, 0
    if s <= 0:
        return False, 0, 0
    X = np.asarray(X, float).reshape(-1, 2)
    D = e.distances(X, e.prepare(np.array([c, c2])))
    left = sides(e, extension_path(e, p, q), X, strict=False) > 0
    # stay clear of the boundary of D, where membership is a tolerance call
    sel = left & (D[:, 0] <= r - 1e3 * e.tol)
    bad = sel & (D[:, 1] > r2 + e.tol)
    return True, int(np.count_nonzero(sel)), int(np.count_nonzero(bad))


# --------------------------------------------------------- enclosing disk

def check_enclosing(e: Engine, S, res: EnclosingDiskResult, cache: PairCache | None = None) -> list[str]:
    """Problems with an enclosing-disk result: a point outside the disk, or a
    kind whose defining configuration does not hold."""
    S = np.asarray(S, float).reshape(-1, 2)
    tol = e.tol
    c, r = res.disk.center, res.disk.radius
    d = e.distances([c], e.prepare(S))[0]
    out = [f"point {k} at {d[k]:.12g} > r {r:.12g}" for k in np.flatnonzero(d > r + tol)]
    w = res.witnesses
    on = np.abs(d[list(w)] - r)
    # boundary points are located by transition refinement along a trace
    slack = max(1e3 * tol, 1e-9 * e.diameter)
    if np.any(on > slack):
        out.append(f"witness off the boundary by {float(on.max()):.3g}")
    if res.kind == THREE:
        paths = [e.path(S[w[i]], S[w[(i + 1) % 3]]) for i in range(3)]
        if not in_geodesic_triangle(e, paths, c[None])[0]:
            out.append("center outside the geodesic triangle")
    elif res.kind == DIAMETRAL:
        g = e.path(S[w[0]], S[w[1]])
        if np.hypot(*(g.midpoint - c)) > slack:
            out.append("center is not the midpoint")
    elif res.kind == ALL_PAIR:
        T = cache if cache is not None else PairCache(e, S)
        if T.profile(*w).min_inside != len(S):
            out.append("some disk through the pair misses a point")
    else:
        out.append(f"unknown kind {res.kind}")
    return out


# ----------------------------------------------------------- theorem suite

@dataclass
class LemmaReport:
    lemma: str
    trials: int = 0
    failures: list = field(default_factory=list)
    resolution: float | None = None
    advisory: bool = False
    detail: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.advisory or not self.failures

    def to_dict(self) -> dict:
        return {"lemma": self.lemma, "trials": self.trials, "failures": self.failures,
                "resolution": self.resolution, "advisory": self.advisory, "ok": self.ok,
                "detail": self.detail}


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def theorem_bounds(n: int) -> list[tuple]:
    """(id, variant, kind, bound, min n) for every theorem with an explicit constant."""
    return [
        ("pi>=ceil((n-2)/60)", "pi", "lower", _ceil_div(n - 2, 60), 5),
        ("pi>=ceil(5(n-2)/84)", "pi", "lower", _ceil_div(5 * (n - 2), 84), 8),
        ("pi>=ceil(n/5)+1", "pi", "lower", _ceil_div(n, 5) + 1, 6),
        ("pi_in_out>=ceil(16(n-2)/665)", "pi_in_out", "lower", _ceil_div(16 * (n - 2), 665), 21),
        ("pi_in_out>=ceil(n/13.08)-2", "pi_in_out", "advisory", math.ceil(n / 13.08) - 2, 14),
        ("pi_convex>=ceil(n/3)+1", "pi_convex", "lower", _ceil_div(n, 3) + 1, 4),
        ("pi_diam>=ceil(n/3)+1", "pi_diam", "lower", _ceil_div(n, 3) + 1, 3),
        ("pi_bichrom>=ceil((n-2)/72)", "pi_bichrom", "lower", _ceil_div(n - 2, 72), 6),
        ("pi_bichrom>=ceil((n-2)/36)+2", "pi_bichrom", "lower", _ceil_div(n - 2, 36) + 2, 6),
        ("pi_bichrom>=ceil(n/(6+sqrt26))+1", "pi_bichrom", "lower", math.ceil(n / (6 + math.sqrt(26))) + 1, 12),
        ("pi_bichrom_in_out>=ceil(n/(14+2sqrt43))+1", "pi_bichrom_in_out", "lower",
         math.ceil(n / (14 + 2 * math.sqrt(43))) + 1, 28),
        ("pi_bichrom<=ceil(n/5)+1", "pi_bichrom", "upper", _ceil_div(n, 5) + 1, 6),
    ]


def theorem_suite(inst: Instance, report: BoundsReport | None = None, **kw) -> list[LemmaReport]:
    """Compare the instance's variant values with every applicable bound.

    The upper bound applies only to instances of the bichromatic construction;
    the n/13.08 in-out bound is reported but never fails."""
    rep = report if report is not None else bounds_report(inst, **kw)
    n = rep.n
    out = []
    for tid, var, kind, bound, nmin in theorem_bounds(n):
        val = rep.variants[var].value
        if n < nmin or val is None:
            continue
        if kind == "upper" and inst.meta.get("generator") != "upper_bichrom":
            continue
        ok = val <= bound if kind == "upper" else val >= bound
        lr = LemmaReport(tid, 1, [] if ok else [{"value": val, "bound": bound}],
                         advisory=(kind == "advisory"),
                         detail={"variant": var, "value": val, "bound": bound, "kind": kind,
                                 "witness": list(rep.variants[var].witness or ())})
        out.append(lr)
    ov = ordering_violations(rep)
    out.append(LemmaReport("variant-ordering", 1, ov))
    return out


__all__ = [
    "VARIANTS", "PairRow", "VariantValue", "BoundsReport", "bounds_report", "ordering_violations",
    "side_matrix", "crossing_pairs", "intersection_number", "intersection_lower_bound",
    "dominating_pairs", "dominating_bound", "QuadResult", "check_quadrilateral",
    "TriangleResult", "check_triangle_lemmas", "check_disk_containment", "check_enclosing",
    "LemmaReport", "theorem_bounds", "theorem_suite", "DegenerateCoreError",
]
