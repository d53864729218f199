"""Command-line front end.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or input error
(including instances rejected by the general-position validation)."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from itertools import combinations

import numpy as np

from .bisector import BisectorError, CycleError, PairCache, enclosing_disk, trace_point
from .constructions import GeneratorSpec, generate
from .depth import (bounds_report, check_enclosing, check_quadrilateral, check_triangle_lemmas, crossing_pairs,
                    intersection_lower_bound, side_matrix, theorem_suite)
from .geodesic import DegenerateCoreError, GeneralPositionError, build_engine
from .oracle import sampled_profile
from .polygon import InstanceError, load_instance, serialize_instance
from .validation import validate_general_position

KINDS = {"upper-bichrom": "upper_bichrom", "convex-circle": "convex_circle", "random": "random",
         "library-polygon": "library_polygon"}


class UsageError(Exception):
    pass


def _round(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}") if math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.generic):
        return _round(obj.item())
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist())
    return obj


def _dump(obj, path=None):
    text = json.dumps(_round(obj), indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(path):
    try:
        return load_instance(path)
    except OSError as exc:
        raise UsageError(f"cannot read instance {path}: {exc.strerror}") from None


def _setup(inst, validate=True):
    e = build_engine(inst.polygon)
    T = PairCache(e, inst.points)
    if validate:
        rep = validate_general_position(inst, engine=e, cache=T)
        if not rep.ok:
            raise UsageError("instance rejected (general position): "
                             + json.dumps(_round(rep.to_dict()["violations"][:5])))
    return e, T


# ---------------------------------------------------------------- commands

def cmd_gen(a) -> int:
    spec = GeneratorSpec(KINDS[a.kind], a.n, a.seed, a.jitter, a.polygon, a.factor, a.colored, a.eps)
    inst = generate(spec)
    text = serialize_instance(inst)
    if a.output:
        with open(a.output, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return 0


def cmd_depth(a) -> int:
    inst = _load(a.instance)
    e, T = _setup(inst, not a.no_validate)
    i, j = a.pair
    if not (0 <= i < inst.n and 0 <= j < inst.n and i != j):
        raise UsageError("pair must name two distinct point indices")
    prof = T.profile(i, j)
    out = prof.to_dict()
    out["pair"] = [i, j]
    if a.trace:
        out["trace"] = T.trace(i, j).to_dict()
    _dump(out, a.output)
    return 0


def cmd_report(a) -> int:
    inst = _load(a.instance)
    e, T = _setup(inst, not a.no_validate)
    rep = bounds_report(inst, e, T)
    out = rep.to_dict()
    out["theorems"] = [lr.to_dict() for lr in theorem_suite(inst, rep)]
    _dump(out, a.output)
    if a.csv:
        with open(a.csv, "w") as fh:
            fh.write(rep.to_csv())
    return 0


def cmd_verify(a) -> int:
    inst = _load(a.instance)
    e, T = _setup(inst, True)
    S = inst.points
    n = inst.n
    rep = bounds_report(inst, e, T)
    suites = {}
    th = theorem_suite(inst, rep)
    suites["theorems"] = {"ok": all(lr.ok for lr in th), "entries": [lr.to_dict() for lr in th]}
    # oracle equivalence on every pair
    mism = []
    for i, j in combinations(range(n), 2):
        p = T.profile(i, j)
        o = sampled_profile(e, i, j, S, a.oracle_step, trace=T.trace(i, j))
        eng = (p.min_inside, p.max_inside, p.min_outside, p.max_outside)
        if eng != o.extrema():
            mism.append([i, j, list(eng), list(o.extrema())])
    suites["oracle"] = {"ok": not mism, "pairs": n * (n - 1) // 2, "step": a.oracle_step, "mismatches": mism}
    # quadrilateral lemmas on every crossing quadruple
    sm = side_matrix(e, S)
    quads = crossing_pairs(e, S, sm)
    bad_q = [list(q) for q in quads if not check_quadrilateral(e, *q, cache=T, sm=sm).ok]
    suites["quadrilateral"] = {"ok": not bad_q, "crossing": len(quads), "failures": bad_q[:10]}
    suites["intersection"] = {"ok": len(quads) >= intersection_lower_bound(n) and
                              (not inst.convex or len(quads) == math.comb(n, 4)),
                              "I": len(quads), "lower": intersection_lower_bound(n)}
    # triangle lemmas on every triple
    bad_t, degen = [], 0
    for tri in combinations(range(n), 3):
        for u, v, w in (tri, tri[1:] + tri[:1], tri[2:] + tri[:2]):
            try:
                r = check_triangle_lemmas(e, S[u], S[v], S[w])
            except DegenerateCoreError:
                degen += 1
                continue
            if not (r.geq_ok and r.leq_ok):
                bad_t.append([u, v, w])
    suites["triangle"] = {"ok": not bad_t, "failures": bad_t[:10], "degenerate_cores": degen}
    try:
        res = enclosing_disk(e, S, cache=T)
        probs = check_enclosing(e, S, res, T)
        suites["enclosing"] = {"ok": not probs, "kind": res.kind, "witnesses": list(res.witnesses),
                               "problems": probs}
    except (CycleError, GeneralPositionError) as exc:
        suites["enclosing"] = {"ok": False, "problems": [str(exc)]}
    ok = all(s["ok"] for s in suites.values())
    _dump({"ok": ok, "suites": suites}, a.output)
    return 0 if ok else 1


def cmd_figure(a) -> int:
    from .svg import figure
    inst = _load(a.instance)
    e = build_engine(inst.polygon)
    T = PairCache(e, inst.points)
    geos, traces, disks, trans = [], [], [], []
    for i, j in a.geodesic or []:
        geos.append(e.path(inst.points[i], inst.points[j]))
    for i, j in a.pair or []:
        tr = T.trace(i, j)
        traces.append(tr)
        geos.append(e.path(inst.points[i], inst.points[j]))
        if a.transitions:
            for t in T.profile(i, j).transitions:
                trans.append(trace_point(e, tr, t.t))
        if a.disk is not None:
            disks.append(trace_point(e, tr, a.disk))
    svg = figure(inst, e, geos, traces, disks, trans, title=a.title)
    with open(a.output, "w") as fh:
        fh.write(svg)
    return 0


def cmd_accept(a) -> int:
    from .acceptance import run_acceptance
    res = run_acceptance(a.scale, log=lambda s: print(s, flush=True))
    return 0 if all(c.passed for c in res) else 1


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="geodepth", description="Geodesic disk depth in simple polygons.")
    p.add_argument("--tol", type=float, help="relative tolerance (overrides GEODEPTH_TOL)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("--kind", choices=sorted(KINDS), required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--polygon", default="big-square")
    g.add_argument("--jitter", type=float, default=1e-3)
    g.add_argument("--factor", type=float, default=50.0)
    g.add_argument("--eps", type=float, default=0.1)
    g.add_argument("--colored", action="store_true")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("depth", help="depth profile of one pair")
    d.add_argument("instance")
    d.add_argument("--pair", nargs=2, type=int, required=True, metavar=("I", "J"))
    d.add_argument("--trace", action="store_true", help="include the trace samples")
    d.add_argument("--no-validate", action="store_true")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_depth)

    r = sub.add_parser("report", help="bounds report with witnesses")
    r.add_argument("instance")
    r.add_argument("--csv", help="write the per-pair table here")
    r.add_argument("--no-validate", action="store_true")
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_report)

    v = sub.add_parser("verify", help="lemma suites, oracle equivalence and theorem checks")
    v.add_argument("instance")
    v.add_argument("--oracle-step", type=float, default=1e-3)
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("figure", help="SVG figure of an instance")
    f.add_argument("instance")
    f.add_argument("-o", "--output", required=True)
    f.add_argument("--pair", nargs=2, type=int, action="append", metavar=("I", "J"),
                   help="draw the bisector trace and geodesic of a pair")
    f.add_argument("--geodesic", nargs=2, type=int, action="append", metavar=("I", "J"))
    f.add_argument("--transitions", action="store_true", help="draw the transition disks of each pair")
    f.add_argument("--disk", type=float, metavar="T", help="draw the disk centered at trace parameter T")
    f.add_argument("--title")
    f.set_defaults(func=cmd_figure)

    ac = sub.add_parser("accept", help="full acceptance run")
    ac.add_argument("--scale", type=float, default=1.0, help="shrink sample counts (smoke runs only)")
    ac.set_defaults(func=cmd_accept)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if a.tol is not None:
        if not a.tol > 0:
            print("error: --tol must be positive", file=sys.stderr)
            return 2
        os.environ["GEODEPTH_TOL"] = repr(a.tol)
    try:
        return a.func(a)
    except (UsageError, InstanceError, GeneralPositionError, BisectorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


run = main

if __name__ == "__main__":
    sys.exit(main())
