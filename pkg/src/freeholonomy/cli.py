"""Command-line surface.

Every output document embeds a manifest (command, config echo, seed,
versions) sufficient to re-run it.  Timing is only recorded under
--timing so that identical inputs produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .arrangement import graph_to_json
from .field import (
    build_context,
    extension_bound_check,
    invariance_audit,
    loop_distance,
    master_trace,
)
from .geometry import Loop, LoopError, parse_loop
from .levy import CharTriplet, TripletError, bm_support, moments
from .simulate import SimConfig, SimError, mc_compare, spectral_support_check
from .words import format_word


class UsageError(ValueError):
    pass


def _read_loops(path: str) -> list[Loop]:
    loops = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            loops.append(parse_loop(line))
    if not loops:
        raise LoopError(f"no loops in {path}")
    return loops


def _parse_angle(tok: str) -> float:
    tok = tok.strip()
    sign = 1.0
    if tok.startswith("-"):
        sign, tok = -1.0, tok[1:]
    if tok == "pi":
        return sign * math.pi
    if tok.startswith("pi/"):
        return sign * math.pi / float(tok[3:])
    return sign * float(tok)


def _triplet_from_args(args) -> CharTriplet:
    if getattr(args, "triplet", None):
        with open(args.triplet) as fh:
            return CharTriplet.from_json(json.load(fh))
    if getattr(args, "alpha", None) is None and getattr(args, "b", None) is None:
        raise UsageError("need --triplet FILE or inline --alpha/--b/--atoms")
    atoms = []
    if getattr(args, "atoms", None):
        for part in args.atoms.split(","):
            phi, w = part.split(":")
            atoms.append((_parse_angle(phi), float(w)))
    return CharTriplet(args.alpha or 0.0, args.b or 0.0, tuple(atoms))


def _manifest(args, extra: dict | None = None) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "out") and v is not None}
    man = {
        "command": args.command,
        "config": cfg,
        "seed": getattr(args, "seed", None),
        "versions": {"freeholonomy": __version__, "numpy": np.__version__},
    }
    if extra:
        man.update(extra)
    return man


def _emit(args, payload: dict, t0: float):
    if getattr(args, "timing", False):
        payload["manifest"]["wall_ms"] = round((time.perf_counter() - t0) * 1000.0, 3)
    text = json.dumps(payload, indent=2, sort_keys=True)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_csv(args, manifest: dict, header: list[str], rows: list[list], t0: float):
    buf = io.StringIO()
    if getattr(args, "timing", False):
        manifest["wall_ms"] = round((time.perf_counter() - t0) * 1000.0, 3)
    buf.write("# " + json.dumps(manifest, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    text = buf.getvalue()
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _c(z: complex) -> list[float]:
    return [z.real, z.imag]


# -- subcommands ----------------------------------------------------------------


def cmd_arrange(args, t0):
    loops = _read_loops(args.loops)
    from .arrangement import build_arrangement

    graph, words = build_arrangement(loops)
    payload = {
        "manifest": _manifest(args),
        "graph": graph_to_json(graph),
        "loop_words": [[(e + 1) * s for e, s in w.letters] for w in words],
    }
    _emit(args, payload, t0)


def cmd_basis(args, t0):
    loops = _read_loops(args.loops)
    from .arrangement import build_arrangement, facial_lasso_basis, spanning_tree

    graph, _words = build_arrangement(loops)
    tree = spanning_tree(graph)
    basis = facial_lasso_basis(graph, tree)
    payload = {
        "manifest": _manifest(args),
        "areas": [[f.area.numerator, f.area.denominator] for f in graph.bounded_faces],
        "lassos": [[(e + 1) * s for e, s in l.letters] for l in basis.lassos],
        "tree_edges": sorted(tree.tree_edges),
        "edge_lassos": {str(e): format_word(w.letters) for e, w in basis.edge_lasso.items()},
    }
    _emit(args, payload, t0)


def cmd_decompose(args, t0):
    loops = _read_loops(args.loops)
    trip = CharTriplet(0.0, 1.0, ())  # decomposition is law-independent
    ctx = build_context(loops, trip)
    payload = {
        "manifest": _manifest(args),
        "areas": ctx.areas,
        "words": [format_word(ctx.facial_word(lp).letters) for lp in loops],
    }
    _emit(args, payload, t0)


def cmd_moments(args, t0):
    trip = _triplet_from_args(args)
    ms = moments(trip, args.t, args.order)
    payload = {
        "manifest": _manifest(args),
        "t": args.t,
        "moments": [_c(ms.moment(n)) for n in range(args.order + 1)],
    }
    _emit(args, payload, t0)


def cmd_trace(args, t0):
    loops = _read_loops(args.loops)
    trip = _triplet_from_args(args)
    ctx = build_context(loops, trip)
    results = []
    for i, lp in enumerate(loops):
        results.append(
            {
                "loop": i,
                "trace": _c(master_trace(ctx, lp)),
                "word": format_word(ctx.facial_word(lp).letters),
                "areas": ctx.areas,
            }
        )
    _emit(args, {"manifest": _manifest(args), "results": results}, t0)


def _sim_config(args, trip) -> SimConfig:
    return SimConfig(
        N=args.N,
        triplet=trip,
        samples=args.samples,
        seed=args.seed,
        dt=args.dt,
        scheme=args.scheme,
    )


def _stats_rows(loops, ctx, cfg, timing) -> list[list]:
    rows = []
    for i, lp in enumerate(loops):
        t1 = time.perf_counter()
        st = mc_compare(ctx, lp, cfg)
        ms = round((time.perf_counter() - t1) * 1000.0, 3) if timing else 0
        rows.append(
            [
                i, cfg.N, st.samples,
                f"{st.mean.real:.12g}", f"{st.mean.imag:.12g}", f"{st.stderr:.12g}",
                f"{st.exact.real:.12g}", f"{st.exact.imag:.12g}", f"{st.sigmas:.6g}",
                ms,
            ]
        )
    return rows


_STATS_HEADER = ["loop_id", "N", "samples", "mean_re", "mean_im", "stderr",
                 "exact_re", "exact_im", "sigmas", "wall_ms"]


def cmd_simulate(args, t0):
    loops = _read_loops(args.loops)
    trip = _triplet_from_args(args)
    ctx = build_context(loops, trip)
    cfg = _sim_config(args, trip)
    rows = _stats_rows(loops, ctx, cfg, args.timing)
    _emit_csv(args, _manifest(args), _STATS_HEADER, rows, t0)


def cmd_compare(args, t0):
    cmd_simulate(args, t0)  # simulate already reports exact traces and sigmas


def cmd_bound(args, t0):
    loops = _read_loops(args.loops)
    trip = _triplet_from_args(args)
    reports = []
    for i, lp in enumerate(loops):
        rep = extension_bound_check(lp, args.n, trip, args.K)
        reports.append(
            {
                "loop": i,
                "n": rep.n,
                "K": rep.K,
                "lhs": rep.lhs,
                "rhs": rep.rhs,
                "length": rep.length,
                "approx_length": rep.approx_length,
                "satisfied": rep.satisfied,
            }
        )
    _emit(args, {"manifest": _manifest(args), "reports": reports}, t0)


def cmd_audit(args, t0):
    loops = _read_loops(args.loops)
    trip = _triplet_from_args(args)
    rep = invariance_audit(loops, trip, trials=args.trials, seed=args.seed)
    payload = {
        "manifest": _manifest(args),
        "max_deviation": rep.max_deviation,
        "variants": rep.variants,
        "base_traces": [_c(v) for v in rep.base_traces],
    }
    _emit(args, payload, t0)


def cmd_support(args, t0):
    trip = _triplet_from_args(args)
    cfg = SimConfig(N=args.N, triplet=trip, samples=args.samples, seed=args.seed,
                    dt=args.dt, scheme="euler")
    rep = spectral_support_check(cfg, args.t)
    arc = bm_support(trip.alpha, trip.b, args.t)
    payload = {
        "manifest": _manifest(args),
        "theta": rep.theta,
        "seminorm_dist": arc.seminorm_dist,
        "outlier_fraction": rep.outlier_fraction,
        "samples": rep.samples,
    }
    _emit(args, payload, t0)


def _add_triplet_args(p):
    p.add_argument("--triplet", help="triplet JSON file")
    p.add_argument("--alpha", type=float, help="inline drift")
    p.add_argument("--b", type=float, help="inline diffusivity")
    p.add_argument("--atoms", help='inline atoms "phi:w,phi:w" (phi may be pi or pi/K)')


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="freeholonomy",
                                 description="free planar holonomy fields: exact traces and U(N) simulation")
    ap.add_argument("--out", help="write output to this file")
    ap.add_argument("--timing", action="store_true", help="record wall time (breaks byte determinism)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("arrange", help="loops file -> planar graph JSON")
    p.add_argument("--loops", required=True)
    p.set_defaults(func=cmd_arrange)

    p = sub.add_parser("basis", help="facial lasso basis of the arrangement")
    p.add_argument("--loops", required=True)
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("decompose", help="loops -> words in facial generators")
    p.add_argument("--loops", required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("moments", help="moment sequence of the increment law")
    _add_triplet_args(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--order", type=int, default=8)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("trace", help="exact holonomy traces of loops")
    p.add_argument("--loops", required=True)
    _add_triplet_args(p)
    p.set_defaults(func=cmd_trace)

    for name, fn in (("simulate", cmd_simulate), ("compare", cmd_compare)):
        p = sub.add_parser(name, help="Monte-Carlo traces vs the exact engine (CSV)")
        p.add_argument("--loops", required=True)
        _add_triplet_args(p)
        p.add_argument("--N", type=int, required=True)
        p.add_argument("--samples", type=int, default=500)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--dt", type=float)
        p.add_argument("--scheme", choices=["euler", "euler2"], default="euler2")
        p.set_defaults(func=fn)

    p = sub.add_parser("bound", help="dyadic-approximation distance bound check")
    p.add_argument("--loops", required=True)
    _add_triplet_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--K", type=float, default=1.0)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("audit", help="basis/enumeration/refinement invariance audit")
    p.add_argument("--loops", required=True)
    _add_triplet_args(p)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("support", help="spectral support check of simulated increments")
    _add_triplet_args(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--N", type=int, default=256)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dt", type=float)
    p.set_defaults(func=cmd_support)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    t0 = time.perf_counter()
    try:
        args.func(args, t0)
    except (LoopError, TripletError, SimError, UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
