"""The full acceptance run: every criterion at its stated tolerance.

Instances are generated once and shared between criteria, together with
their engines, trace caches and bounds reports."""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .bisector import CycleError, PairCache, disk_through_three, enclosing_disk, trace_point
from .constructions import enclose_adaptive, gen_convex_circle, gen_random, gen_upper_bichrom
from .depth import (BoundsReport, bounds_report, check_disk_containment, check_enclosing, check_quadrilateral,
                    check_triangle_lemmas, crossing_pairs, dominating_bound, dominating_pairs,
                    intersection_lower_bound, ordering_violations, side_matrix, theorem_suite)
from .geodesic import DegenerateCoreError, Engine, GeneralPositionError, build_engine, convex_position_check
from .oracle import circumcenter, euclidean_reference, sampled_profile
from .polygon import Instance, Location
from .validation import validate_general_position

GENERAL_POLYGONS = ("big-square", "L-shape", "comb-6", "spiral")
CONVEX_SPECS = ((12, "big-square"), (18, "big-square"), (24, "big-square"),
                (12, "comb-6"), (18, "comb-6"), (24, "comb-6"))


@dataclass
class Record:
    name: str
    suite: str
    inst: Instance
    e: Engine
    cache: PairCache
    report: BoundsReport | None = None
    sides: dict | None = None

    def side_matrix(self) -> dict:
        if self.sides is None:
            self.sides = side_matrix(self.e, self.inst.points)
        return self.sides


@dataclass
class Criterion:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    advisories: list = field(default_factory=list)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} [{self.number}] {self.title}: {self.detail}"


def _record(name, suite, inst, store=None) -> Record:
    e = build_engine(inst.polygon)
    return Record(name, suite, inst, e, PairCache(e, inst.points, store))


class AcceptanceRun:
    """scale < 1 shrinks every sample count (for smoke runs); the acceptance
    criteria themselves are defined at scale 1."""

    def __init__(self, scale: float = 1.0, log=None, seed: int = 0):
        self.scale = scale
        self.log = log or (lambda s: None)
        self.rng = np.random.default_rng(seed)
        self.records: dict[str, list[Record]] = {}
        self.results: list[Criterion] = []

    def _n(self, k: int) -> int:
        return max(1, int(round(k * self.scale)))

    # ------------------------------------------------------- instances
    def general(self) -> list[Record]:
        if "general" not in self.records:
            out = []
            for k in range(self._n(50)):
                pid = GENERAL_POLYGONS[k % 4]
                store: dict = {}
                inst = gen_random(28, pid, 1000 + k, cache=store)
                out.append(_record(f"random-{pid}-{1000 + k}", "general", inst, store))
            self.records["general"] = out
        return self.records["general"]

    def convex(self) -> list[Record]:
        if "convex" not in self.records:
            out = []
            for k in range(self._n(20)):
                n, pid = CONVEX_SPECS[k % len(CONVEX_SPECS)]
                store: dict = {}
                inst = gen_convex_circle(n, pid, 3000 + k, cache=store)
                out.append(_record(f"convex-{pid}-n{n}-{3000 + k}", "convex", inst, store))
            self.records["convex"] = out
        return self.records["convex"]

    def colored(self) -> list[Record]:
        if "colored" not in self.records:
            out = []
            for k in range(self._n(30)):
                pid = GENERAL_POLYGONS[k % 4]
                store: dict = {}
                inst = gen_random(28, pid, 2000 + k, colored=True, cache=store)
                out.append(_record(f"colored-{pid}-{2000 + k}", "colored", inst, store))
            self.records["colored"] = out
        return self.records["colored"]

    def upper(self) -> list[Record]:
        if "upper" not in self.records:
            self.records["upper"] = [_record(f"upper-n{n}", "upper", gen_upper_bichrom(n, seed=7))
                                     for n in (10, 20, 30)]
        return self.records["upper"]

    def euclidean(self) -> list[Record]:
        if "euclidean" not in self.records:
            out = []
            for k in range(self._n(10)):
                rng = np.random.default_rng(4000 + k)
                P = rng.random((10, 2))
                inst = enclose_adaptive(P, 50.0, seed=4000 + k, meta={"generator": "enclosed-random"})
                out.append(_record(f"euclidean-{4000 + k}", "euclidean", inst))
            self.records["euclidean"] = out
        return self.records["euclidean"]

    def all_records(self) -> list[Record]:
        return [r for rs in self.records.values() for r in rs]

    def report(self, rec: Record) -> BoundsReport:
        if rec.report is None:
            rec.report = bounds_report(rec.inst, rec.e, rec.cache)
        return rec.report

    # -------------------------------------------------------- criteria
    def _add(self, number, title, passed, detail, t0, advisories=()):
        c = Criterion(number, title, bool(passed), detail, time.time() - t0, list(advisories))
        self.results.append(c)
        self.log(c.line())
        for a in c.advisories:
            self.log(f"     advisory: {a}")
        return c

    def c1_c2(self):
        t0 = time.time()
        recs = self.general()
        vals = [(r.name, self.report(r).pi, self.report(r).pi_diam) for r in recs]
        el = time.time() - t0
        bad1 = [(nm, p) for nm, p, _ in vals if p < math.ceil(28 / 5) + 1]
        adv = [f"suite runtime {el:.0f} s exceeds the 10 min target"] if el > 600 else []
        self._add(1, "lower bound pi >= 7 (n=28)", not bad1,
                  f"{len(vals)} instances, min pi {min(v[1] for v in vals)}, failures {bad1}, "
                  f"generation+reports {el:.0f} s", t0, adv)
        t0 = time.time()
        bad2 = [(nm, d) for nm, _, d in vals if d < math.ceil(28 / 3) + 1]
        self._add(2, "diametral pi_diam >= 11 (n=28)", not bad2,
                  f"{len(vals)} instances, min pi_diam {min(v[2] for v in vals)}, failures {bad2}", t0)

    def c3(self):
        t0 = time.time()
        bad = []
        lows = []
        for r in self.convex():
            ok, _ = convex_position_check(r.e, r.inst.points)
            n = r.inst.n
            p = self.report(r).pi
            lows.append(p - (math.ceil(n / 3) + 1))
            if not ok or not r.inst.convex or p < math.ceil(n / 3) + 1:
                bad.append((r.name, ok, p))
        self._add(3, "convex pi >= ceil(n/3)+1", not bad,
                  f"{len(lows)} instances, min slack {min(lows)}, failures {bad}", t0)

    def c4(self):
        t0 = time.time()
        bad = []
        mins = [99, 99]
        for r in self.colored():
            rep = self.report(r)
            b, bio = rep.pi_bichrom, rep.pi_bichrom_in_out
            mins = [min(mins[0], b), min(mins[1], bio)]
            need = [math.ceil(28 / (6 + math.sqrt(26))) + 1, math.ceil(26 / 36) + 2, math.ceil(26 / 72)]
            if b < max(need) or bio < math.ceil(28 / (14 + 2 * math.sqrt(43))) + 1:
                bad.append((r.name, b, bio))
        self._add(4, "bichromatic pi_bichrom >= 4, pi_bichrom_in_out >= 3", not bad,
                  f"{len(self.colored())} instances, min pi_bichrom {mins[0]}, "
                  f"min pi_bichrom_in_out {mins[1]}, failures {bad}", t0)

    def c5(self):
        t0 = time.time()
        bad, adv = [], []
        cnt = 0
        for r in self.all_records():
            n = r.inst.n
            if n < 21:
                continue
            cnt += 1
            v = self.report(r).pi_in_out
            if v < math.ceil(16 * (n - 2) / 665):
                bad.append((r.name, v))
            if n >= 14 and v < math.ceil(n / 13.08) - 2:
                adv.append(f"{r.name}: pi_in_out {v} below ceil(n/13.08)-2")
        self._add(5, "in-out pi_in_out >= ceil(16(n-2)/665)", not bad,
                  f"{cnt} instances with n >= 21, failures {bad}, advisory cases {len(adv)}", t0, adv)

    def c6(self):
        t0 = time.time()
        rows = []
        bad = []
        for r in self.upper():
            n = r.inst.n
            v = self.report(r).pi_bichrom
            rows.append(f"n={n}: {v} <= {math.ceil(n / 5) + 1}")
            if v > math.ceil(n / 5) + 1:
                bad.append(n)
        self._add(6, "upper construction max bichromatic min_inside <= ceil(n/5)+1", not bad,
                  "; ".join(rows), t0)

    def c7(self, pairs: int = 100):
        t0 = time.time()
        recs = self.all_records()
        mism = []
        diag = []
        fb = 0
        npairs = self._n(pairs)
        for _ in range(npairs):
            r = recs[int(self.rng.integers(len(recs)))]
            i, j = sorted(int(x) for x in self.rng.choice(r.inst.n, 2, replace=False))
            prof = r.cache.profile(i, j)
            fb += prof.fallback
            o = sampled_profile(r.e, i, j, r.inst.points, 1e-3, trace=r.cache.trace(i, j))
            eng = (prof.min_inside, prof.max_inside, prof.min_outside, prof.max_outside)
            if eng != o.extrema():
                mism.append((r.name, i, j, eng, o.extrema()))
                diag.append(self._window_check(r, i, j))
        adv = []
        if mism:
            narrow = max(d[0] for d in diag)
            agree = all(d[1] for d in diag)
            adv.append(f"mismatched pairs: narrowest depth window at most {narrow:.2e} of trace length "
                       f"(step 1e-3); engine depth equals a direct distance count at every window "
                       f"midpoint: {agree}")
        self._add(7, "oracle equivalence at step 1e-3", not mism,
                  f"{npairs} pairs over {len(recs)} instances, mismatches {len(mism)} {mism[:3]}, "
                  f"profiles with fallback {fb}", t0, adv)

    def _window_check(self, r: Record, i: int, j: int) -> tuple[float, bool]:
        """Narrowest window between consecutive transitions, and whether a
        direct distance count at each window midpoint equals the engine depth."""
        prof = r.cache.profile(i, j)
        tr = r.cache.trace(i, j)
        ts = [0.0] + [x.t for x in prof.transitions] + [1.0]
        widths = np.diff(ts)
        agree = True
        for a, b in zip(ts[:-1], ts[1:]):
            m = 0.5 * (a + b)
            c, rad = trace_point(r.e, tr, m)
            d = r.e.distances([c], r.cache.Z)[0]
            inside = d <= rad
            inside[[i, j]] = True
            agree &= int(np.count_nonzero(inside)) == prof.depth_at(m)
        return float(widths[widths > 0].min()), bool(agree)

    def c8(self):
        t0 = time.time()
        worst_d = worst_c = 0.0
        bad_ext = []
        for r in self.euclidean():
            P = r.inst.points
            n = len(P)
            Deng = r.e.distances(P, r.cache.Z)
            Deuc = np.hypot(*(P[:, None] - P[None]).transpose(2, 0, 1))
            off = ~np.eye(n, dtype=bool)
            worst_d = max(worst_d, float(np.max(np.abs(Deng - Deuc)[off] / Deuc[off])))
            for i, j in combinations(range(n), 2):
                tr = r.cache.trace(i, j)
                ref = euclidean_reference(P, (i, j), r.inst.polygon)
                prof = r.cache.profile(i, j)
                eng = (prof.min_inside, prof.max_inside, prof.min_outside, prof.max_outside)
                if eng != ref.extrema():
                    bad_ext.append((r.name, i, j, eng, ref.extrema()))
                for k in range(n):
                    if k in (i, j):
                        continue
                    ds = disk_through_three(r.e, P[i], P[j], P[k], trace=tr)
                    cc, _ = circumcenter(P[i], P[j], P[k])
                    err = np.inf if ds is None else float(np.hypot(*(ds.center - cc)))
                    worst_c = max(worst_c, err)
        ok = worst_d <= 1e-9 and worst_c <= 1e-6 and not bad_ext
        self._add(8, "Euclidean regime", ok,
                  f"{len(self.euclidean())} instances, max relative distance error {worst_d:.2e}, "
                  f"max center error {worst_c:.2e}, extrema mismatches {len(bad_ext)} {bad_ext[:3]}", t0)

    # ---------------------------------------------------------- lemmas
    def _random_points(self, e: Engine, k: int) -> np.ndarray:
        V = e.polygon.vertices
        lo, hi = V.min(axis=0), V.max(axis=0)
        out = []
        while len(out) < k:
            q = lo + self.rng.random(2) * (hi - lo)
            if e.locate(q) is Location.INSIDE:
                out.append(q)
        return np.array(out)

    def c9(self):
        t0 = time.time()
        parts = []
        ok_all = True
        recs = self.general()

        # (a) disk containment
        configs = fails = samples = 0
        attempts = 0
        need = self._n(1000)
        while configs < need and attempts < 50 * need:
            attempts += 1
            r = recs[int(self.rng.integers(len(recs)))]
            i, j = (int(x) for x in self.rng.choice(r.inst.n, 2, replace=False))
            tr = r.cache.trace(i, j)
            p, q = r.inst.points[i], r.inst.points[j]
            t1, t2 = self.rng.random(2)
            X = self._random_points(r.e, 64)
            hyp, tested, bad = check_disk_containment(r.e, tr, p, q, t1, t2, X)
            if not hyp:
                continue
            configs += 1
            samples += tested
            fails += bad > 0
        ok = fails == 0 and configs == need
        ok_all &= ok
        parts.append(f"(a) {configs} configurations, {samples} samples, failing {fails}")

        # (b) quadrilateral lemmas on every crossing quadruple
        quads = qbad = 0
        cases = Counter()
        for r in recs[:self._n(20)]:
            sm = r.side_matrix()
            for a, b, c, d in crossing_pairs(r.e, r.inst.points, sm):
                res = check_quadrilateral(r.e, a, b, c, d, cache=r.cache, sm=sm)
                quads += 1
                cases[res.contain] += 1
                if not res.ok:
                    qbad += 1
        ok = qbad == 0 and quads > 0
        ok_all &= ok
        parts.append(f"(b) {quads} crossing quadruples, invalid {qbad}")

        # (c) triangle lemmas
        tri = geq = leq = tbad = degen = 0
        geq_bad = leq_bad = leq_bad_wide = 0
        need = self._n(1000)
        while tri < need:
            r = recs[int(self.rng.integers(len(recs)))]
            u, v, w = r.inst.points[self.rng.choice(r.inst.n, 3, replace=False)]
            try:
                res = check_triangle_lemmas(r.e, u, v, w)
            except DegenerateCoreError:
                degen += 1
                continue
            tri += 1
            geq += res.geq_applies
            leq += res.leq_applies
            tbad += not (res.geq_ok and res.leq_ok)
            geq_bad += not res.geq_ok
            if not res.leq_ok:
                leq_bad += 1
                # the straight-triangle step of the proof needs this angle <= pi/3
                leq_bad_wide += res.euclid_angle > math.pi / 3
        ok = tbad == 0
        ok_all &= ok
        parts.append(f"(c) {tri} triples (geq applied {geq}, leq applied {leq}, degenerate cores skipped "
                     f"{degen}), failing {tbad} (geq {geq_bad}, leq {leq_bad}; leq failures with straight "
                     f"angle uvw > pi/3: {leq_bad_wide})")

        # (d) enclosing disk
        kinds = Counter()
        ebad = []
        for r in recs:
            try:
                res = enclosing_disk(r.e, r.inst.points, cache=r.cache)
            except (CycleError, GeneralPositionError) as ex:
                ebad.append((r.name, str(ex)))
                continue
            kinds[res.kind] += 1
            probs = check_enclosing(r.e, r.inst.points, res, r.cache)
            if probs:
                ebad.append((r.name, probs[:2]))
        ok = not ebad
        ok_all &= ok
        parts.append(f"(d) {len(recs)} instances, kinds {dict(kinds)}, failures {ebad[:3]}")

        # (e) dominating pairs in 8-subsets
        dbad = 0
        need = self._n(200)
        lo_in = lo_out = 99
        for k in range(need):
            r = recs[k % len(recs)]
            sub = sorted(int(x) for x in self.rng.choice(r.inst.n, 8, replace=False))
            a = dominating_pairs(r.e, r.inst.points, "inside", sub, r.cache)
            b = dominating_pairs(r.e, r.inst.points, "outside", sub, r.cache)
            lo_in, lo_out = min(lo_in, a), min(lo_out, b)
            dbad += a < dominating_bound(8) or b < dominating_bound(8)
        ok = dbad == 0
        ok_all &= ok
        parts.append(f"(e) {need} subsets, min inside {lo_in}, min outside {lo_out} (need {dominating_bound(8)}), "
                     f"failing {dbad}")

        # (f) intersection numbers
        ibad = []
        cnt = 0
        for r in self.all_records():
            n = r.inst.n
            val = len(crossing_pairs(r.e, r.inst.points, r.side_matrix()))
            cnt += 1
            if val < intersection_lower_bound(n):
                ibad.append((r.name, val))
            if r.inst.convex and val != math.comb(n, 4):
                ibad.append((r.name, val, math.comb(n, 4)))
        ok = not ibad
        ok_all &= ok
        parts.append(f"(f) {cnt} instances, failures {ibad[:3]}")
        self._add(9, "lemma suites", ok_all, "; ".join(parts), t0)

    def c10(self):
        t0 = time.time()
        bad = []
        th = []
        for r in self.all_records():
            rep = self.report(r)
            if ordering_violations(rep):
                bad.append((r.name, ordering_violations(rep)))
            for lr in theorem_suite(r.inst, rep):
                if not lr.ok:
                    th.append((r.name, lr.lemma, lr.failures))
        adv = [f"theorem suite: {t}" for t in th]
        self._add(10, "variant ordering on every instance", not bad,
                  f"{len(self.all_records())} instances, violations {bad[:3]}, theorem-suite failures {len(th)}",
                  t0, adv)

    def validate_all(self) -> list:
        """General-position validation of the constructed (non-sampled) instances."""
        out = []
        for r in self.upper() + self.euclidean():
            rep = validate_general_position(r.inst, engine=r.e, cache=r.cache)
            if not rep.ok:
                out.append((r.name, sorted(rep.kinds())))
        return out

    def run(self) -> list[Criterion]:
        t0 = time.time()
        self.c1_c2()
        self.c3()
        self.c4()
        self.upper()
        self.euclidean()
        self.c5()
        self.c6()
        self.c7()
        self.c8()
        self.c9()
        self.c10()
        self.log(f"total {time.time() - t0:.0f} s")
        return self.results


def run_acceptance(scale: float = 1.0, log=print) -> list[Criterion]:
    return AcceptanceRun(scale, log).run()
