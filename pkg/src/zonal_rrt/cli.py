"""Command line entry point: ``plan``, ``bench`` and ``gen-map``."""
from __future__ import annotations

import argparse
import json
import logging
import os
from pathlib import Path as FsPath
import sys
import time

from .harness.experiment import PlannerConfig, Scenario, run_planner, run_scenario
from .harness.io import load_map, save_map, write_json
from .harness.mapgen import gen_forest_map
from .harness.metrics import emit_csv, summarize
from .harness.svg import emit_svg
from .local_planner import PlanFailure, Timeout, path_is_valid

LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging() -> None:
    level = os.environ.get("PLANNER_LOG", "error").lower()
    if level not in LOG_LEVELS:
        raise SystemExit(f"PLANNER_LOG must be one of {sorted(LOG_LEVELS)}, got {level!r}")
    logging.basicConfig(level=LOG_LEVELS[level], format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)


def cmd_plan(args) -> int:
    world = load_map(args.map)
    cfg = PlannerConfig(args.algo, depth=args.depth)
    t0 = time.monotonic()
    try:
        result = run_planner(world, cfg, args.seed, deadline=t0 + args.time_limit)
    except (PlanFailure, Timeout) as exc:
        print(json.dumps({"success": False, "failure_stage": getattr(exc, "stage", "timeout"),
                          "error": str(exc), "wall_time_s": time.monotonic() - t0}))
        return 1
    elapsed = time.monotonic() - t0
    path = result.path
    valid = path_is_valid(path, world, cfg.rrt_params(world, args.seed).goal_tolerance)
    print(json.dumps({"success": valid, "wall_time_s": elapsed, "path_length": path.length,
                      "waypoints": len(path.waypoints), "zone_sequence": path.zone_sequence,
                      "stage_timings": path.stats.get("stage_timings", {})}))
    if args.ledger:
        write_json({"planner": cfg.planner_id, "seed": args.seed, "wall_time_s": elapsed,
                    **result.to_dict()}, args.ledger)
    if args.svg:
        FsPath(args.svg).write_text(emit_svg(world, path, result.decomposition, result.graph),
                                    encoding="utf-8")
    return 0 if valid else 1


def cmd_bench(args) -> int:
    data = json.loads(FsPath(args.scenario).read_text(encoding="utf-8"))
    if args.warm_timings:
        data["warm_timings"] = True
    scenario = Scenario.from_dict(data)
    out = FsPath(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = run_scenario(scenario, jobs=args.jobs, keep_paths=args.keep_paths)
    emit_csv(records, out / "records.csv")
    summary = summarize(records)
    write_json(summary, out / "summary.json")
    write_json({"scenario": scenario.to_dict(), "records": [vars(r) for r in records]},
               out / "ledger.json")
    for pid, s in summary.items():
        avg = "n/a" if s["avg_time"] is None else f"{s['avg_time']:.4f}s"
        print(f"{pid:14s} success {s['success_rate']:5.1f}%  avg_time {avg}  "
              f"invalid {s['invalid_paths']}  errors {s['errors']}")
    return 0


def cmd_gen_map(args) -> int:
    world = gen_forest_map(args.dim, args.n_obstacles, bounds_extent=args.extent,
                           radius_range=(args.rmin, args.rmax), seed=args.seed,
                           obstacle_kind=args.kind, agent_radius=args.agent_radius)
    save_map(world, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zonal-rrt", description="Zone-decomposed RRT planning.")
    sub = p.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="plan a single query on a map file")
    plan.add_argument("--map", required=True)
    plan.add_argument("--algo", choices=("rrt", "rrt-star", "zonal"), default="zonal")
    plan.add_argument("--depth", type=int, default=4)
    plan.add_argument("--seed", type=int, default=0)
    plan.add_argument("--time-limit", type=float, default=30.0)
    plan.add_argument("--svg", help="write an SVG rendering here")
    plan.add_argument("--ledger", help="write the JSON run ledger here")
    plan.set_defaults(func=cmd_plan)

    bench = sub.add_parser("bench", help="run a scenario file")
    bench.add_argument("--scenario", required=True)
    bench.add_argument("--out", required=True)
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--warm-timings", action="store_true",
                       help="also time a second query that reuses the pipeline")
    bench.add_argument("--keep-paths", action="store_true",
                       help="store paths and zonal artifacts in the ledger")
    bench.set_defaults(func=cmd_bench)

    gen = sub.add_parser("gen-map", help="write a seeded forest map")
    gen.add_argument("--dim", type=int, default=2)
    gen.add_argument("--n-obstacles", type=int, default=1000)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.add_argument("--extent", type=float, default=200.0)
    gen.add_argument("--rmin", type=float, default=1.0)
    gen.add_argument("--rmax", type=float, default=3.0)
    gen.add_argument("--kind", choices=("ball", "box"))
    gen.add_argument("--agent-radius", type=float, default=0.0)
    gen.set_defaults(func=cmd_gen_map)
    return p


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
