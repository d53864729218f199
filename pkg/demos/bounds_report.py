"""Depth variants of a random instance against the proven lower bounds."""

import math

from geodepth.constructions import gen_random
from geodepth.depth import bounds_report, theorem_suite

inst = gen_random(20, "spiral", 4, colored=True)
rep = bounds_report(inst)
for name, val in rep.variants.items():
    if val is not None and val.value is not None:
        print(f"{name:18s} {val.value:3d}  witness pair {val.witness}")
print()
for lr in theorem_suite(inst, rep):
    print(f"{'ok ' if lr.ok else 'BAD'} {lr.lemma}: {lr.detail}")
print(f"\nn={inst.n}: general lower bound ceil(n/5)+1 = {math.ceil(inst.n / 5) + 1}")
