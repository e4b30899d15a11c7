"""Command-line interface.

One executable with subcommands for reordering, access-pattern
generation, stream simulation, the Euler solver, pipeline planning and
the renumbering benchmark.  Every subcommand takes --seed (default 42)
and writes its artifacts under --out.  Exit codes: 0 success, 2 for
precondition violations, 1 for internal errors.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import eulerfv, pipegen, streamsim
from .accesspattern import AccessPattern, generate_bounded_pattern, \
    validate_pattern
from .errors import PreconditionError
from .meshcore import (Labeling, classical_bandwidth, dual_graph, load_gmsh,
                       read_edge_list, read_labeling, serial_bandwidth,
                       write_labeling)
from .reorder import am1_reorder, exact_min_sbw, gps_reorder

DEFAULT_SEED = 42
CSV_VERSION = "# meshstream-csv v1"


def _load_graph(path):
    path = str(path)
    if path.endswith(".msh"):
        return dual_graph(load_gmsh(path))
    return read_edge_list(path)


def _out_dir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_csv(path, header, comment, rows):
    with open(path, "w", newline="") as fh:
        fh.write(f"{CSV_VERSION} {comment}\n")
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _threads():
    try:
        return max(1, int(os.environ.get("MESHSTREAM_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------

def cmd_reorder(args):
    g = _load_graph(args.input)
    t0 = time.perf_counter()
    if args.algo == "gps":
        lab = gps_reorder(g)
    elif args.algo == "am1":
        lab = am1_reorder(g, seed=args.seed)
    else:
        lab, _ = exact_min_sbw(g)
    wall = time.perf_counter() - t0

    out = _out_dir(args)
    stem = Path(args.input).stem
    lab_path = out / f"{stem}_{args.algo}.labels"
    write_labeling(lab, lab_path)
    sbw = serial_bandwidth(g, lab)
    cbw = classical_bandwidth(g, lab)
    _write_csv(out / f"{stem}_{args.algo}_metrics.csv",
               ["n", "algo", "classical_bw", "serial_bw", "wall_seconds"],
               "reorder", [[g.n, args.algo, cbw, sbw, f"{wall:.6f}"]])
    print(f"n={g.n} algo={args.algo} classical_bw={cbw} serial_bw={sbw}")
    print(f"labeling written to {lab_path}")
    return 0


def cmd_pattern(args):
    g = _load_graph(args.input)
    t0 = time.perf_counter()
    pat = generate_bounded_pattern(g, args.bound, seed=args.seed)
    wall = time.perf_counter() - t0
    out = _out_dir(args)
    stem = Path(args.input).stem
    pat_path = out / f"{stem}_bound{args.bound}.pattern"
    pat.write(pat_path)
    _write_csv(out / f"{stem}_bound{args.bound}_metrics.csv",
               ["n", "bound", "parts", "overall_length", "k", "wall_seconds"],
               "pattern",
               [[g.n, args.bound, pat.n_parts, pat.length,
                 f"{pat.k:.6f}", f"{wall:.6f}"]])
    print(f"n={g.n} bound={args.bound} parts={pat.n_parts} "
          f"length={pat.length} k={pat.k:.4f}")
    print(f"pattern written to {pat_path}")
    return 0


def cmd_simulate(args):
    g = _load_graph(args.input)
    if bool(args.labeling) == bool(args.pattern):
        raise PreconditionError("supply exactly one of --labeling/--pattern")
    if args.labeling:
        schedule = read_labeling(args.labeling)
        if args.capacity is None:
            capacity = streamsim.capacity_for(g, schedule)
        else:
            capacity = args.capacity
    else:
        schedule = AccessPattern.read(args.pattern)
        capacity = args.capacity or (schedule.bound + 1)
        if args.check:
            report = validate_pattern(g, schedule)
            status = "ok" if report.ok else "INVALID"
            print(f"pattern check: {status} violations={len(report.violations)}"
                  f" k={report.k:.4f}")
            if not report.ok:
                return 1

    mem = streamsim.MemoryUnitConfig(capacity=capacity,
                                     precision=args.precision,
                                     node_record_bytes=streamsim.
                                     NODE_RECORD_BYTES[args.precision])
    rep = streamsim.simulate_stream(g, schedule, mem)
    out = _out_dir(args)
    path = out / f"{Path(args.input).stem}_sim.csv"
    with open(path, "w") as fh:
        fh.write(rep.to_csv())
    if args.json:
        print(rep.to_json())
    else:
        print(f"capacity={capacity} processed={rep.processed} "
              f"misses={rep.misses} cycles={rep.cycles} "
              f"node_bytes={rep.node_bytes}")
    return 0


def cmd_solve(args):
    mesh = load_gmsh(args.input)
    if args.config:
        config = eulerfv.SolverConfig.from_file(args.config)
    else:
        config = eulerfv.SolverConfig()
    if args.tend is not None:
        config = eulerfv.SolverConfig(gamma=config.gamma, cfl=config.cfl,
                                      t_end=args.tend,
                                      fixed_dt=config.fixed_dt,
                                      inflow=config.inflow)
    labeling = read_labeling(args.labeling) if args.labeling else None
    field, stats = eulerfv.run_case(mesh, config, labeling=labeling)
    out = _out_dir(args)
    stem = Path(args.input).stem
    csv_path = Path(args.csv) if args.csv else out / f"{stem}_field.csv"
    eulerfv.field_to_csv(field, csv_path)
    if args.svg:
        from . import plotting
        plotting.render_density(field, mesh, args.svg,
                                title=f"density at t={stats.t_final:.3f}")
        print(f"figure written to {args.svg}")
    print(f"steps={stats.steps} t_final={stats.t_final:.6f} "
          f"updates_per_sec={stats.updates_per_sec:.3e}")
    print(f"field written to {csv_path}")
    return 0


def cmd_pipegen(args):
    text = Path(args.input).read_text()
    latencies = pipegen.load_latency_file(args.latencies) \
        if args.latencies else None
    g = pipegen.parse_equations(text)
    leveled = pipegen.level_and_insert_delays(g, latencies)
    seed_obj, final_obj = pipegen.order_horizontally(
        leveled, seed=args.seed, restarts=args.restarts)
    plan = pipegen.cluster_rectangles(leveled, io_limit=args.io_limit,
                                      band_rows=args.band_rows)
    out = _out_dir(args)
    plan_path = Path(args.plan) if args.plan \
        else out / f"{Path(args.input).stem}_plan.json"
    pipegen.write_plan(leveled, plan, plan_path)
    if args.svg:
        from . import plotting
        plotting.render_pipeline(leveled, plan, args.svg)
        print(f"figure written to {args.svg}")
    io_max = max((len(c.in_nets) + len(c.out_nets) for c in plan.clusters),
                 default=0)
    print(f"operators={g.operator_count()} depth={pipegen.pipeline_depth(leveled)}"
          f" clusters={len(plan.clusters)} max_io={io_max}"
          f" objective={final_obj:.1f} (seed {seed_obj:.1f})")
    print(f"plan written to {plan_path}")
    return 0


def _bench_one(mesh_path, orderings, steps, runs, seed):
    mesh = load_gmsh(mesh_path)
    g = dual_graph(mesh)
    rows = []
    config = eulerfv.SolverConfig(t_end=float("inf"))
    for name in orderings:
        labeling = None
        if name == "am1":
            labeling = am1_reorder(g, seed=seed)
        elif name == "gps":
            labeling = gps_reorder(g)
        elif name != "natural":
            raise PreconditionError(f"unknown ordering {name!r}")
        rates = []
        for _ in range(runs):
            _, stats = eulerfv.run_case(mesh, config, labeling=labeling,
                                        max_steps=steps)
            rates.append(stats.updates_per_sec)
        rows.append({"mesh": Path(mesh_path).name, "n_tri": mesh.n_tri,
                     "ordering": name,
                     "updates_per_sec": float(np.median(rates))})
    return rows


def cmd_bench(args):
    meshes = [m for m in args.meshes.split(",") if m]
    orderings = [o for o in args.orderings.split(",") if o]
    rows = []
    for mesh_path in meshes:
        rows.extend(_bench_one(mesh_path, orderings, args.steps, args.runs,
                               args.seed))
    out = _out_dir(args)
    _write_csv(out / "bench.csv",
               ["mesh", "n_tri", "ordering", "updates_per_sec"],
               "bench",
               [[r["mesh"], r["n_tri"], r["ordering"],
                 f"{r['updates_per_sec']:.3f}"] for r in rows])
    from . import plotting
    plotting.render_bench(rows, out / "bench.svg")
    for r in rows:
        print(f"{r['mesh']} n_tri={r['n_tri']} {r['ordering']}: "
              f"{r['updates_per_sec']:.3e} updates/s")
    print(f"results written to {out / 'bench.csv'} and {out / 'bench.svg'}")
    return 0


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="meshstream",
                                description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--out", default=".", help="output directory")

    sp = sub.add_parser("reorder", help="compute a bandwidth-reducing labeling")
    sp.add_argument("input", help="mesh (.msh) or edge-list graph")
    sp.add_argument("--algo", choices=("gps", "am1", "exact"), default="am1")
    common(sp)
    sp.set_defaults(func=cmd_reorder)

    sp = sub.add_parser("pattern", help="generate a bounded access pattern")
    sp.add_argument("input")
    sp.add_argument("--bound", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_pattern)

    sp = sub.add_parser("simulate", help="replay a schedule through the "
                                         "streaming memory model")
    sp.add_argument("input")
    sp.add_argument("--labeling")
    sp.add_argument("--pattern")
    sp.add_argument("--capacity", type=int)
    sp.add_argument("--check", action="store_true",
                    help="validate the pattern before simulating")
    sp.add_argument("--precision", choices=("single", "double"),
                    default="double")
    sp.add_argument("--json", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("solve", help="run the finite-volume flow solver")
    sp.add_argument("input")
    sp.add_argument("--config", help="key-value solver config file")
    sp.add_argument("--tend", type=float)
    sp.add_argument("--labeling")
    sp.add_argument("--svg", help="write a density pseudocolor figure")
    sp.add_argument("--csv", help="field output path")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("pipegen", help="plan the arithmetic pipeline")
    sp.add_argument("input", help="equation text file")
    sp.add_argument("--io-limit", type=int, default=10)
    sp.add_argument("--band-rows", type=int, default=2)
    sp.add_argument("--restarts", type=int, default=8)
    sp.add_argument("--latencies", help="operator latency override file")
    sp.add_argument("--plan", help="plan output path")
    sp.add_argument("--svg", help="render the clustered pipeline")
    common(sp)
    sp.set_defaults(func=cmd_pipegen)

    sp = sub.add_parser("bench", help="renumbering throughput benchmark")
    sp.add_argument("--meshes", required=True,
                    help="comma-separated .msh paths")
    sp.add_argument("--orderings", default="natural,am1")
    sp.add_argument("--steps", type=int, default=20)
    sp.add_argument("--runs", type=int, default=5)
    common(sp)
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:                      # internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
