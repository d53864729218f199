"""Shortest paths and one bisector in the comb polygon, with an SVG figure."""

from pathlib import Path

import numpy as np

from geodepth.bisector import depth_profile, trace_bisector, trace_point
from geodepth.constructions import get_polygon
from geodepth.geodesic import build_engine
from geodepth.polygon import Instance
from geodepth.svg import figure

comb = get_polygon("comb-6")
e = build_engine(comb)
S = np.array([(1.5, 3.5), (11.5, 3.2), (4.2, 0.6), (7.6, 2.8), (9.4, 0.5), (3.4, 2.1)])

u, v = S[0], S[1]
g = e.path(u, v)
print(f"|g(u,v)| = {g.length:.6f} (straight {np.hypot(*(u - v)):.6f}), bends at {g.points[1:-1].round(3).tolist()}")

tr = trace_bisector(e, u, v)
print(f"bisector: {len(tr.t)} samples, from {tr.start.round(4)} to {tr.end.round(4)}")

prof = depth_profile(e, 0, 1, S, trace=tr)
print(f"min_inside {prof.min_inside}, max_inside {prof.max_inside}")
for t in prof.transitions:
    print(f"  point {t.z} {t.direction} at t={t.t:.6f}")

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)
disk = trace_point(e, tr, 0.5)
svg = figure(Instance(comb, S), e, [g], [tr], [disk], title="comb: g(u,v), b(u,v) and the disk at t=0.5")
(out / "comb_bisector.svg").write_text(svg)
print("wrote", out / "comb_bisector.svg")
