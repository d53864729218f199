"""Numba kernels for the hot loops: visibility, distances, bisector marching.

Conventions: E is the (m, 4) edge array, R the (r, 2) reflex vertices,
T a (k, 2) array of targets and DT the (k, r) geodesic distances from each
target to each reflex vertex.  ``eps`` is an absolute length slack.
"""

import math

import numpy as np
from numba import njit

OK, STALL, CORRECTOR_FAIL, OVERFLOW, NO_START = 0, 1, 2, 3, 4


@njit(cache=True)
def _scan_edges(ax, ay, bx, by, E, eps):
    """Proper crossings of segment ab with polygon edges, and the number of
    polygon vertices lying on the open segment.  Returns (crossed, hits)."""
    lab = math.hypot(bx - ax, by - ay)
    xmin = min(ax, bx) - eps
    xmax = max(ax, bx) + eps
    ymin = min(ay, by) - eps
    ymax = max(ay, by) + eps
    hits = 0
    for i in range(E.shape[0]):
        x0 = E[i, 0]
        y0 = E[i, 1]
        x1 = E[i, 2]
        y1 = E[i, 3]
        if max(x0, x1) < xmin or min(x0, x1) > xmax or max(y0, y1) < ymin or min(y0, y1) > ymax:
            continue
        o1 = ((bx - ax) * (y0 - ay) - (by - ay) * (x0 - ax)) / lab
        o2 = ((bx - ax) * (y1 - ay) - (by - ay) * (x1 - ax)) / lab
        if abs(o1) <= eps:
            s = ((x0 - ax) * (bx - ax) + (y0 - ay) * (by - ay)) / lab
            if eps < s < lab - eps:
                hits += 1
        if not ((o1 > eps and o2 < -eps) or (o1 < -eps and o2 > eps)):
            continue
        le = math.hypot(x1 - x0, y1 - y0)
        o3 = ((x1 - x0) * (ay - y0) - (y1 - y0) * (ax - x0)) / le
        o4 = ((x1 - x0) * (by - y0) - (y1 - y0) * (bx - x0)) / le
        if (o3 > eps and o4 < -eps) or (o3 < -eps and o4 > eps):
            return True, hits
    return False, hits


@njit(cache=True)
def seg_crosses(ax, ay, bx, by, E, eps):
    """True if segment ab properly crosses some polygon edge."""
    if ax == bx and ay == by:
        return False
    return _scan_edges(ax, ay, bx, by, E, eps)[0]


@njit(cache=True)
def inside_closed(px, py, E, eps):
    """Point in closed polygon (boundary band of width eps counts as inside)."""
    inside = False
    e2 = eps * eps
    for i in range(E.shape[0]):
        x0 = E[i, 0]
        y0 = E[i, 1]
        x1 = E[i, 2]
        y1 = E[i, 3]
        if not (px < min(x0, x1) - eps or px > max(x0, x1) + eps
                or py < min(y0, y1) - eps or py > max(y0, y1) + eps):
            dx = x1 - x0
            dy = y1 - y0
            s = ((px - x0) * dx + (py - y0) * dy) / (dx * dx + dy * dy)
            if s < 0.0:
                s = 0.0
            elif s > 1.0:
                s = 1.0
            rx = px - x0 - s * dx
            ry = py - y0 - s * dy
            if rx * rx + ry * ry <= e2:
                return True
        if (y0 > py) != (y1 > py):
            xint = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
            if px < xint:
                inside = not inside
    return inside


@njit(cache=True)
def _on_open_segment(ax, ay, bx, by, L, wx, wy, eps):
    """Parameter of w along ab if w lies on the open segment, else -1."""
    s = ((wx - ax) * (bx - ax) + (wy - ay) * (by - ay)) / (L * L)
    if s * L <= eps or (1.0 - s) * L <= eps:
        return -1.0
    if abs((bx - ax) * (wy - ay) - (by - ay) * (wx - ax)) / L > eps:
        return -1.0
    return s


@njit(cache=True)
def visible(ax, ay, bx, by, E, eps):
    """Segment ab inside the closed polygon.  Vertices lying on ab split it
    and every piece is tested, so grazing runs along collinear vertices
    (e.g. across a notch) are caught."""
    if ax == bx and ay == by:
        return inside_closed(ax, ay, E, eps)
    crossed, hits = _scan_edges(ax, ay, bx, by, E, eps)
    if crossed:
        return False
    if hits == 0:
        return inside_closed(0.5 * (ax + bx), 0.5 * (ay + by), E, eps)
    L = math.hypot(bx - ax, by - ay)
    m = E.shape[0]
    cuts = np.empty(m + 2)
    cuts[0] = 0.0
    k = 1
    for i in range(m):
        s = _on_open_segment(ax, ay, bx, by, L, E[i, 0], E[i, 1], eps)
        if s >= 0.0:
            cuts[k] = s
            k += 1
    cuts[k] = 1.0
    c = np.sort(cuts[:k + 1])
    for j in range(k):
        sm = 0.5 * (c[j] + c[j + 1])
        if not inside_closed(ax + sm * (bx - ax), ay + sm * (by - ay), E, eps):
            return False
    return True


@njit(cache=True)
def visible_many(px, py, Q, E, eps):
    out = np.empty(Q.shape[0], np.bool_)
    for k in range(Q.shape[0]):
        out[k] = visible(px, py, Q[k, 0], Q[k, 1], E, eps)
    return out


@njit(cache=True)
def dist_row(px, py, E, R, T, DT, eps, out_d, out_a):
    """Geodesic distance from p to every target; out_a holds the last reflex
    vertex before p on the path (-1 for a direct segment, -2 unreachable)."""
    r = R.shape[0]
    vis = np.empty(r, np.bool_)
    dr = np.empty(r)
    for a in range(r):
        dr[a] = math.hypot(R[a, 0] - px, R[a, 1] - py)
        vis[a] = visible(px, py, R[a, 0], R[a, 1], E, eps)
    for k in range(T.shape[0]):
        if visible(px, py, T[k, 0], T[k, 1], E, eps):
            out_d[k] = math.hypot(T[k, 0] - px, T[k, 1] - py)
            out_a[k] = -1
            continue
        best = np.inf
        ba = -2
        for a in range(r):
            if vis[a]:
                val = dr[a] + DT[k, a]
                if val < best:
                    best = val
                    ba = a
        out_d[k] = best
        out_a[k] = ba


@njit(cache=True)
def dist_matrix(P, E, R, T, DT, eps):
    n = P.shape[0]
    k = T.shape[0]
    D = np.empty((n, k))
    A = np.empty((n, k), np.int64)
    for i in range(n):
        dist_row(P[i, 0], P[i, 1], E, R, T, DT, eps, D[i], A[i])
    return D, A


@njit(cache=True)
def dist_matrix_via(P, PR, E, T, DT, eps):
    """dist_matrix for points whose geodesic distances PR (n, r) to the reflex
    vertices are already known."""
    n = P.shape[0]
    k = T.shape[0]
    r = PR.shape[1]
    D = np.empty((n, k))
    for i in range(n):
        px = P[i, 0]
        py = P[i, 1]
        for j in range(k):
            if visible(px, py, T[j, 0], T[j, 1], E, eps):
                D[i, j] = math.hypot(T[j, 0] - px, T[j, 1] - py)
                continue
            best = np.inf
            for a in range(r):
                val = PR[i, a] + DT[j, a]
                if val < best:
                    best = val
            D[i, j] = best
    return D


@njit(cache=True)
def _unit_from(px, py, qx, qy):
    dx = px - qx
    dy = py - qy
    L = math.hypot(dx, dy)
    if L == 0.0:
        return 0.0, 0.0
    return dx / L, dy / L


@njit(cache=True)
def fgrad(px, py, E, R, T2, DT2, eps, bd, ba):
    """f = d(p,u) - d(p,v) and its gradient; also returns d(p,u)."""
    dist_row(px, py, E, R, T2, DT2, eps, bd, ba)
    if ba[0] == -2 or ba[1] == -2:
        return np.nan, 0.0, 0.0, np.nan
    if ba[0] == -1:
        gux, guy = _unit_from(px, py, T2[0, 0], T2[0, 1])
    else:
        gux, guy = _unit_from(px, py, R[ba[0], 0], R[ba[0], 1])
    if ba[1] == -1:
        gvx, gvy = _unit_from(px, py, T2[1, 0], T2[1, 1])
    else:
        gvx, gvy = _unit_from(px, py, R[ba[1], 0], R[ba[1], 1])
    f = _excess(px, py, T2[0], DT2[0], ba[0], T2[1], DT2[1], ba[1], R)
    return f, gux - gvx, guy - gvy, bd[0]


@njit(cache=True)
def correct(px, py, max_move, E, R, T2, DT2, eps, ftol, bd, ba):
    """Newton iteration on f along its gradient.  Returns x, y, radius, ok."""
    x0 = px
    y0 = py
    # converged when the residual is below ftol and the Newton step below 1e-3 ftol;
    # the step test matters where |grad f| is small (far centers, close pairs)
    last_x = px
    last_y = py
    last_r = np.nan
    for _ in range(40):
        if not inside_closed(px, py, E, eps):
            break
        f, gx, gy, du = fgrad(px, py, E, R, T2, DT2, eps, bd, ba)
        if f != f:
            break
        g2 = gx * gx + gy * gy
        if abs(f) <= ftol:
            last_x = px
            last_y = py
            last_r = du
            if g2 < 1e-24 or abs(f) <= 1e-3 * ftol * math.sqrt(g2):
                return px, py, du, True
        elif g2 < 1e-24:
            break
        sx = -f * gx / g2
        sy = -f * gy / g2
        L = math.hypot(sx, sy)
        if L > 0.5 * max_move:
            sx *= 0.5 * max_move / L
            sy *= 0.5 * max_move / L
        px += sx
        py += sy
        if math.hypot(px - x0, py - y0) > 4.0 * max_move:
            break
    if last_r == last_r:
        return last_x, last_y, last_r, True
    return px, py, np.nan, False


@njit(cache=True)
def _tangent(px, py, E, R, T2, DT2, eps, bd, ba, sx, sy):
    f, gx, gy, du = fgrad(px, py, E, R, T2, DT2, eps, bd, ba)
    L = math.hypot(gx, gy)
    if L == 0.0 or f != f:
        return 0.0, 0.0
    tx = -gy / L
    ty = gx / L
    if tx * sx + ty * sy < 0.0:
        tx = -tx
        ty = -ty
    return tx, ty


@njit(cache=True)
def march(Ax, Ay, Bx, By, h0, E, R, T2, DT2, eps, ftol, max_samples):
    """Predictor-corrector walk along f = 0 from boundary point A to B.

    Returns (points, radii, count, status, fail_x, fail_y)."""
    pts = np.empty((max_samples, 2))
    rad = np.empty(max_samples)
    bd = np.empty(2)
    ba = np.empty(2, np.int64)
    f, gx, gy, du = fgrad(Ax, Ay, E, R, T2, DT2, eps, bd, ba)
    pts[0, 0] = Ax
    pts[0, 1] = Ay
    rad[0] = du
    # initial direction: the tangent sign that enters the polygon
    L = math.hypot(gx, gy)
    if L == 0.0 or f != f:
        return pts, rad, 1, NO_START, Ax, Ay
    tx = -gy / L
    ty = gx / L
    probe = 1e-3 * h0
    in_p = inside_closed(Ax + probe * tx, Ay + probe * ty, E, 0.0)
    in_m = inside_closed(Ax - probe * tx, Ay - probe * ty, E, 0.0)
    if in_m and not in_p:
        tx = -tx
        ty = -ty
    elif in_p == in_m:
        if tx * (Bx - Ax) + ty * (By - Ay) < 0.0:
            tx = -tx
            ty = -ty
    x = Ax
    y = Ay
    h = h0
    hmin = h0 * 2.0 ** -34
    count = 1
    cos_max = math.cos(5.0 * math.pi / 180.0)
    while True:
        dBx = Bx - x
        dBy = By - y
        dB = math.hypot(dBx, dBy)
        if count > 1 and dB <= 1.05 * h and (tx * dBx + ty * dBy) >= -0.5 * dB:
            if count >= max_samples:
                return pts, rad, count, OVERFLOW, x, y
            pts[count, 0] = Bx
            pts[count, 1] = By
            f, gx, gy, du = fgrad(Bx, By, E, R, T2, DT2, eps, bd, ba)
            rad[count] = du
            count += 1
            return pts, rad, count, OK, Bx, By
        qx, qy, rq, ok = correct(x + h * tx, y + h * ty, h, E, R, T2, DT2, eps, ftol, bd, ba)
        good = ok
        if good:
            step = math.hypot(qx - x, qy - y)
            if step > 1.6 * h or step < 0.4 * h:
                good = False
        if good and seg_crosses(x, y, qx, qy, E, eps):
            good = False
        if good:
            nx, ny = _tangent(qx, qy, E, R, T2, DT2, eps, bd, ba, tx, ty)
            if nx == 0.0 and ny == 0.0:
                good = False
            elif nx * tx + ny * ty < cos_max and h > h0 * 2.0 ** -12:
                good = False
        if not good:
            h *= 0.5
            if h < hmin:
                return pts, rad, count, STALL, x, y
            continue
        if count >= max_samples - 1:
            return pts, rad, count, OVERFLOW, x, y
        pts[count, 0] = qx
        pts[count, 1] = qy
        rad[count] = rq
        count += 1
        x = qx
        y = qy
        tx = nx
        ty = ny
        if h < h0:
            h = min(h0, 2.0 * h)


@njit(cache=True)
def trace_point(t, ts, C, E, R, T2, DT2, eps, ftol, bd, ba):
    """Point on the trace at parameter t: interpolate, then correct."""
    n = ts.shape[0]
    lo = 0
    hi = n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ts[mid] <= t:
            lo = mid
        else:
            hi = mid
    span = ts[hi] - ts[lo]
    w = 0.0 if span <= 0.0 else (t - ts[lo]) / span
    px = C[lo, 0] + w * (C[hi, 0] - C[lo, 0])
    py = C[lo, 1] + w * (C[hi, 1] - C[lo, 1])
    seg = math.hypot(C[hi, 0] - C[lo, 0], C[hi, 1] - C[lo, 1])
    qx, qy, rq, ok = correct(px, py, max(seg, 1e-300), E, R, T2, DT2, eps, ftol, bd, ba)
    if ok:
        return qx, qy, rq
    f, gx, gy, du = fgrad(px, py, E, R, T2, DT2, eps, bd, ba)
    return px, py, du


@njit(cache=True)
def _excess(cx, cy, z, Dz, az, u, Du, au, R):
    """d(c, z) - d(c, u) without cancellation: each distance is |c - anchor| plus
    the rest of the path, and the two |c - anchor| terms are differenced as
    (q - p).(2c - p - q) / (|c - p| + |c - q|)."""
    if az == -1:
        px, py, rp = z[0], z[1], 0.0
    else:
        px, py, rp = R[az, 0], R[az, 1], Dz[az]
    if au == -1:
        qx, qy, rq = u[0], u[1], 0.0
    else:
        qx, qy, rq = R[au, 0], R[au, 1], Du[au]
    dp = math.hypot(cx - px, cy - py)
    dq = math.hypot(cx - qx, cy - qy)
    den = dp + dq
    lead = 0.0 if den == 0.0 else ((qx - px) * (2 * cx - px - qx) + (qy - py) * (2 * cy - py - qy)) / den
    return lead + (rp - rq)


@njit(cache=True)
def refine_roots(brackets, ts, C, Z, DZ, E, R, T2, DT2, eps, ftol, ttol):
    """Bisection on h_z(t) = d(c(t), z) - radius(t) for each bracket row
    (z index, t_lo, t_hi, inside_at_lo).  Returns refined t values."""
    nb = brackets.shape[0]
    out = np.empty(nb)
    bd = np.empty(2)
    ba = np.empty(2, np.int64)
    zd = np.empty(1)
    za = np.empty(1, np.int64)
    ud = np.empty(1)
    ua = np.empty(1, np.int64)
    for b in range(nb):
        zi = int(brackets[b, 0])
        lo = brackets[b, 1]
        hi = brackets[b, 2]
        in_lo = brackets[b, 3] > 0.5
        Zk = Z[zi:zi + 1]
        Dk = DZ[zi:zi + 1]
        while hi - lo > ttol:
            tm = 0.5 * (lo + hi)
            cx, cy, rc = trace_point(tm, ts, C, E, R, T2, DT2, eps, ftol, bd, ba)
            dist_row(cx, cy, E, R, Zk, Dk, eps, zd, za)
            dist_row(cx, cy, E, R, T2[0:1], DT2[0:1], eps, ud, ua)
            if (_excess(cx, cy, Zk[0], Dk[0], za[0], T2[0], DT2[0], ua[0], R) <= 0.0) == in_lo:
                lo = tm
            else:
                hi = tm
        out[b] = 0.5 * (lo + hi)
    return out


@njit(cache=True)
def boundary_root(x0, y0, x1, y1, s_lo, s_hi, f_lo_pos, E, R, T2, DT2, eps, iters):
    """Bisection for the sign change of f on the edge (x0,y0)-(x1,y1)."""
    bd = np.empty(2)
    ba = np.empty(2, np.int64)
    for _ in range(iters):
        sm = 0.5 * (s_lo + s_hi)
        if sm == s_lo or sm == s_hi:
            break
        px = x0 + sm * (x1 - x0)
        py = y0 + sm * (y1 - y0)
        dist_row(px, py, E, R, T2, DT2, eps, bd, ba)
        if (bd[0] - bd[1] > 0.0) == f_lo_pos:
            s_lo = sm
        else:
            s_hi = sm
    return 0.5 * (s_lo + s_hi)
