"""A triple in the comb where the small-angle triangle bound fails if the
angle at v is read as the angle of the geodesic core, while it holds for the
straight angle uvw."""

import math

from geodepth.constructions import get_polygon
from geodepth.depth import check_triangle_lemmas
from geodepth.geodesic import build_engine

e = build_engine(get_polygon("comb-6"))
u = (12.216948534621727, 0.5679442215619974)
v = (9.325543540599762, 2.854257750697957)
w = (6.993201084057154, 0.9866455091364976)
r = check_triangle_lemmas(e, u, v, w)
uv, vw, _, uw = r.lengths
print(f"core angle at v {r.angle:.4f} (pi/3 = {math.pi / 3:.4f}), straight angle uvw {r.euclid_angle:.4f}")
print(f"|g(u,v)| = {uv:.4f}, |g(v,w)| = {vw:.4f}, |g(u,w)| = {uw:.4f}")
print("bound |g(u,w)| <= max of the other two:", r.leq_ok)
