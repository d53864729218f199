"""The five-cluster bichromatic configuration meets ceil(n/5)+1 exactly."""

import math

from geodepth.constructions import gen_upper_bichrom
from geodepth.depth import bounds_report

for n in (10, 20, 30):
    inst = gen_upper_bichrom(n)
    rep = bounds_report(inst)
    print(f"n={n}: max over bichromatic pairs of min_inside = {rep.pi_bichrom}, bound {math.ceil(n / 5) + 1}, "
          f"enclosure factor {inst.meta['enclosure_factor']:g}")
