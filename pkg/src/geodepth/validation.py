"""General-position checks for an instance."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import _kernels as K
from .bisector import BisectorError, PairCache, _ftol, _profile, _transitions
from .geodesic import Engine, GeneralPositionError, _polyline_dist, build_engine, extension_path
from .polygon import Instance

KINDS = ("collinear-triple", "cocircular-quadruple", "extension-hits-reflex",
         "point-on-geodesic-to-reflex", "bisector-near-vertex", "bisector-untraceable")


@dataclass(frozen=True)
class Violation:
    kind: str
    witnesses: tuple  # ints index S, "v<k>" strings name polygon vertices
    measure: float


@dataclass
class GeneralPositionReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set:
        return {v.kind for v in self.violations}

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": [
            {"kind": v.kind, "witnesses": list(v.witnesses), "measure": float(f"{v.measure:.12g}")}
            for v in self.violations]}


def _root_t(e, trace, Z, k, lo, hi, in_lo, ttol):
    pt = trace.pair_targets
    br = np.array([[k, lo, hi, 1.0 if in_lo else 0.0]])
    return float(K.refine_roots(br, trace.t, trace.points, Z.pts, Z.reflex_dist, e.E, e.R,
                                pt.pts, pt.reflex_dist, e.eps, _ftol(e), ttol)[0])


def validate_general_position(inst: Instance, tol: float | None = None, engine: Engine | None = None,
                              cache: PairCache | None = None, cocircular: bool = True) -> GeneralPositionReport:
    e = engine if engine is not None else build_engine(inst.polygon)
    tol = e.tol if tol is None else tol
    S = inst.points
    n = len(S)
    V = inst.polygon.vertices
    rep = GeneralPositionReport()
    add = rep.violations.append
    paths = {}
    for i, j in combinations(range(n), 2):
        paths[i, j] = e.path(S[i], S[j])

    # collinear triples: a third point within tol of the path between two others
    for (i, j), g in paths.items():
        others = [k for k in range(n) if k not in (i, j)]
        if not others:
            continue
        d = _polyline_dist(g.points, S[others])
        for k, dk in zip(others, d):
            if dk <= tol:
                add(Violation("collinear-triple", tuple(sorted((i, j, k))), float(dk)))
    # one triple may be caught from several pairs; keep the first
    seen = set()
    uniq = []
    for v in rep.violations:
        if v.witnesses not in seen:
            seen.add(v.witnesses)
            uniq.append(v)
    rep.violations[:] = uniq

    # a point on the geodesic from another point to a reflex vertex
    for i in range(n):
        for a, ka in enumerate(e.reflex_idx):
            g = e.path(S[i], e.R[a])
            others = [k for k in range(n) if k != i]
            d = _polyline_dist(g.points, S[others])
            for k, dk in zip(others, d):
                if dk <= tol:
                    add(Violation("point-on-geodesic-to-reflex", (i, k, f"v{ka}"), float(dk)))

    # extensions through reflex vertices
    for (i, j), g in paths.items():
        try:
            extension_path(e, S[i], S[j], g)
        except GeneralPositionError:
            add(Violation("extension-hits-reflex", (i, j), 0.0))

    # bisectors through polygon vertices
    Dv = e.distances(V, e.prepare(S))  # (m, n)
    for i, j in combinations(range(n), 2):
        f = np.abs(Dv[:, i] - Dv[:, j])
        for k in np.flatnonzero(f <= tol):
            add(Violation("bisector-near-vertex", (i, j, f"v{k}"), float(f[k])))

    if cocircular and n >= 2:
        _cocircular(e, inst, tol, cache, add)
    return rep


def _label_key(x):
    return (1, int(x[1:])) if isinstance(x, str) else (0, x)


def _cocircular(e, inst, tol, cache, add):
    """Quadruples with at least two points of S on a common disk: two roots
    of h_z, z in S or a vertex, coinciding along the bisector of a pair of S."""
    S = inst.points
    n = len(S)
    V = inst.polygon.vertices
    if cache is None:
        cache = PairCache(e, S)
    ZV = e.prepare(np.vstack([S, V]))
    labels = list(range(n)) + [f"v{k}" for k in range(len(V))]
    found = set()
    for i, j in combinations(range(n), 2):
        try:
            tr = cache.trace(i, j)
        except BisectorError:
            add(Violation("bisector-untraceable", (i, j), float("nan")))
            continue
        trans, inside0 = _transitions(e, tr, ZV, force=(i, j))
        # the columns for S give the pair's depth profile for free
        if (i, j) not in cache.profiles:
            cache.profiles[i, j] = _profile((i, j), n, [t for t in trans if t.z < n], inside0[:n])
        if len(trans) < 2:
            continue
        ts = np.array([t.t for t in trans])
        order = np.argsort(ts)
        for a, b in zip(order[:-1], order[1:]):
            if (ts[b] - ts[a]) * tr.length > max(tol, 1e-6 * tr.length):
                continue
            # candidate: refine both roots hard before deciding
            ta, tb = trans[a], trans[b]
            roots = []
            for tz in (ta, tb):
                in_lo = not tz.enters
                roots.append(_root_t(e, tr, ZV, tz.z, max(0.0, tz.t - 2e-8), min(1.0, tz.t + 2e-8), in_lo, 1e-15))
            gap = abs(roots[0] - roots[1]) * tr.length
            if gap <= tol:
                quad = tuple(sorted((i, j, labels[ta.z], labels[tb.z]), key=_label_key))
                if quad not in found:
                    found.add(quad)
                    add(Violation("cocircular-quadruple", quad, float(gap)))
