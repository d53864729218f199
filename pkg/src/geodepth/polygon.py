"""Simple polygons, point location and the instance JSON format."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

DEFAULT_REL_TOL = 1e-9


class InstanceError(ValueError):
    """Raised for malformed or structurally invalid inputs."""


class Location(str, Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def rel_tol() -> float:
    """Relative tolerance, overridable through GEODEPTH_TOL."""
    raw = os.environ.get("GEODEPTH_TOL")
    if raw is None:
        return DEFAULT_REL_TOL
    val = float(raw)
    if not val > 0:
        raise InstanceError(f"GEODEPTH_TOL must be positive, got {raw!r}")
    return val


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _segments_intersect(p1, p2, q1, q2, eps):
    d1 = _cross(q1, q2, p1)
    d2 = _cross(q1, q2, p2)
    d3 = _cross(p1, p2, q1)
    d4 = _cross(p1, p2, q2)
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and \
            ((d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)):
        return True
    # touching / collinear overlap
    for a, b, c, d in ((q1, q2, p1, d1), (q1, q2, p2, d2), (p1, p2, q1, d3), (p1, p2, q2, d4)):
        if abs(d) <= eps and _seg_dist(c, a, b) <= 1e-12 * (1 + np.hypot(*(b - a))):
            return True
    return False


def _seg_dist(p, a, b):
    ab = b - a
    L2 = float(ab @ ab)
    if L2 == 0.0:
        return float(np.hypot(*(p - a)))
    s = min(1.0, max(0.0, float((p - a) @ ab) / L2))
    return float(np.hypot(*(p - a - s * ab)))


@dataclass(frozen=True, eq=False)
class Polygon:
    """Counterclockwise simple polygon. Construction validates the invariants."""

    vertices: np.ndarray

    def __post_init__(self):
        V = np.array(self.vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] != 2 or len(V) < 3:
            raise InstanceError("polygon needs at least 3 two-dimensional vertices")
        if not np.all(np.isfinite(V)):
            raise InstanceError("polygon coordinates must be finite")
        V.setflags(write=False)
        object.__setattr__(self, "vertices", V)
        self._check()

    # -- basic geometry
    @property
    def m(self) -> int:
        return len(self.vertices)

    @property
    def edges(self) -> np.ndarray:
        """(m, 4) array of x0, y0, x1, y1; edge i runs from vertex i to i+1."""
        V = self.vertices
        return np.hstack([V, np.roll(V, -1, axis=0)])

    @property
    def signed_area(self) -> float:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    @property
    def diameter(self) -> float:
        V = self.vertices
        return float(np.max(np.hypot(*(V[:, None, :] - V[None, :, :]).transpose(2, 0, 1))))

    @property
    def reflex_mask(self) -> np.ndarray:
        V = self.vertices
        prev = np.roll(V, 1, axis=0)
        nxt = np.roll(V, -1, axis=0)
        turn = (V[:, 0] - prev[:, 0]) * (nxt[:, 1] - V[:, 1]) - (V[:, 1] - prev[:, 1]) * (nxt[:, 0] - V[:, 0])
        return turn < 0

    @property
    def perimeter(self) -> float:
        E = self.edges
        return float(np.sum(np.hypot(E[:, 2] - E[:, 0], E[:, 3] - E[:, 1])))

    def _check(self):
        V = self.vertices
        m = len(V)
        scale = float(np.max(np.abs(V - V.mean(axis=0)))) or 1.0
        eps = 1e-12 * scale * scale
        for i in range(m):
            a, b, c = V[i - 1], V[i], V[(i + 1) % m]
            if np.hypot(*(c - b)) == 0:
                raise InstanceError("non-simple: repeated vertex")
            if abs(_cross(a, b, c)) <= eps:
                raise InstanceError(f"collinear consecutive edges at vertex {i}")
        for i in range(m):
            for j in range(i + 1, m):
                if j == i + 1 or (i == 0 and j == m - 1):
                    continue
                if _segments_intersect(V[i], V[(i + 1) % m], V[j], V[(j + 1) % m], eps):
                    raise InstanceError(f"non-simple: edges {i} and {j} intersect")
        if self.signed_area <= 0:
            raise InstanceError("polygon must be counterclockwise")

    def boundary_point(self, pos: float) -> np.ndarray:
        """Point at boundary position pos = edge index + fraction."""
        m = self.m
        pos = pos % m
        i = int(np.floor(pos))
        f = pos - i
        a, b = self.vertices[i], self.vertices[(i + 1) % m]
        return a + f * (b - a)

    def boundary_position(self, q) -> tuple[float, float]:
        """Closest boundary position to q and the distance to it."""
        q = np.asarray(q, float)
        E = self.edges
        a, b = E[:, :2], E[:, 2:]
        ab = b - a
        L2 = np.einsum("ij,ij->i", ab, ab)
        s = np.clip(np.einsum("ij,ij->i", q - a, ab) / L2, 0.0, 1.0)
        d = np.hypot(*(q - a - s[:, None] * ab).T)
        i = int(np.argmin(d))
        pos = i + float(s[i])
        if pos >= self.m:
            pos -= self.m
        return pos, float(d[i])


def point_location(poly: Polygon, q, tol: float | None = None) -> Location:
    """Classify q by crossing count, with a boundary band of width tol."""
    if tol is None:
        tol = rel_tol() * poly.diameter
    q = np.asarray(q, float)
    _, d = poly.boundary_position(q)
    if d <= tol:
        return Location.BOUNDARY
    V = poly.vertices
    x0, y0 = V[:, 0], V[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    straddle = (y0 > q[1]) != (y1 > q[1])
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = x0 + (q[1] - y0) * (x1 - x0) / (y1 - y0)
    hits = np.count_nonzero(straddle & (q[0] < xint))
    return Location.INSIDE if hits % 2 else Location.OUTSIDE


# ---------------------------------------------------------------- instances

COLORS = ("red", "blue", None)


@dataclass(frozen=True, eq=False)
class Instance:
    polygon: Polygon
    points: np.ndarray
    colors: tuple = ()
    seed: int = 0
    convex: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        P = np.array(self.points, dtype=float).reshape(-1, 2)
        P.setflags(write=False)
        object.__setattr__(self, "points", P)
        cols = tuple(self.colors) if self.colors else (None,) * len(P)
        object.__setattr__(self, "colors", cols)
        self._check()

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def colored(self) -> bool:
        return any(c is not None for c in self.colors)

    @property
    def diameter(self) -> float:
        return self.polygon.diameter

    def _check(self):
        P = self.points
        if len(self.colors) != len(P):
            raise InstanceError("one color entry per point required")
        for c in self.colors:
            if c not in COLORS:
                raise InstanceError(f"unknown color {c!r}")
        tol = rel_tol() * self.polygon.diameter
        for k, p in enumerate(P):
            if point_location(self.polygon, p, tol) is not Location.INSIDE:
                raise InstanceError(f"point outside polygon: index {k} at {tuple(p)}")
        if len(P) > 1:
            d = np.hypot(*(P[:, None, :] - P[None, :, :]).transpose(2, 0, 1))
            d[np.diag_indices(len(P))] = np.inf
            if np.min(d) <= tol:
                i, j = np.unravel_index(np.argmin(d), d.shape)
                raise InstanceError(f"points {min(i, j)} and {max(i, j)} coincide")
        if self.colored:
            nr = self.colors.count("red")
            nb = self.colors.count("blue")
            if nr != nb or nr + nb != len(P):
                raise InstanceError(f"unbalanced colors: {nr} red, {nb} blue, {len(P)} points")

    def red_blue_pairs(self):
        return [(i, j) for i in range(self.n) for j in range(i + 1, self.n)
                if {self.colors[i], self.colors[j]} == {"red", "blue"}]


def _num(x) -> float:
    if isinstance(x, bool):
        raise InstanceError("boolean where a coordinate was expected")
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str):
        try:
            return float(x)
        except ValueError:
            raise InstanceError(f"bad coordinate {x!r}") from None
    raise InstanceError(f"bad coordinate {x!r}")


def _pt(obj) -> list[float]:
    if not isinstance(obj, (list, tuple)) or len(obj) != 2:
        raise InstanceError(f"expected [x, y], got {obj!r}")
    return [_num(obj[0]), _num(obj[1])]


def parse_instance(raw) -> Instance:
    if isinstance(raw, (bytes, bytearray)):
        raw = raw.decode("utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed document: {exc}") from None
    if not isinstance(doc, dict) or "polygon" not in doc or "points" not in doc:
        raise InstanceError("malformed document: need 'polygon' and 'points'")
    if not isinstance(doc["polygon"], list) or not isinstance(doc["points"], list):
        raise InstanceError("malformed document: 'polygon' and 'points' must be lists")
    poly = Polygon(np.array([_pt(v) for v in doc["polygon"]], float).reshape(-1, 2))
    pts, cols = [], []
    for item in doc["points"]:
        if isinstance(item, dict):
            if "p" not in item:
                raise InstanceError("malformed document: point entry without 'p'")
            pts.append(_pt(item["p"]))
            cols.append(item.get("color"))
        else:
            pts.append(_pt(item))
            cols.append(None)
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise InstanceError("malformed document: seed must be an integer")
    convex = doc.get("convex", False)
    if not isinstance(convex, bool):
        raise InstanceError("malformed document: convex must be a boolean")
    meta = doc.get("meta", {})
    return Instance(poly, np.array(pts, float).reshape(-1, 2), tuple(cols), seed, convex, meta)


def serialize_instance(inst: Instance) -> str:
    """JSON text with coordinates as shortest round-trip decimal strings."""
    doc = {
        "polygon": [[repr(float(x)), repr(float(y))] for x, y in inst.polygon.vertices],
        "points": [{"p": [repr(float(x)), repr(float(y))], "color": c}
                   for (x, y), c in zip(inst.points, inst.colors)],
        "seed": int(inst.seed),
        "convex": bool(inst.convex),
    }
    if inst.meta:
        doc["meta"] = inst.meta
    return json.dumps(doc, indent=1)


def load_instance(path) -> Instance:
    with open(path, "rb") as fh:
        return parse_instance(fh.read())
