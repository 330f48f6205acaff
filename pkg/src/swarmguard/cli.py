"""Command-line harness: ``swarmguard {gen,run,mc,episode,verify-bounds}``.

Exit codes: 0 success, 2 usage or configuration error, 3 an exact oracle
exceeded its capacity, 4 an approximation bound was violated.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .attacks import ATTACKERS, DEFAULT_ATTACK_CAP
from .certify import certify
from .distributed import ATTACK_ORACLES, PLANNERS
from .errors import CapacityError, SwarmGuardError
from .scenario import Geometry, Rect, generate_scenario, load_scenario, save_scenario
from .sweep import (
    COLUMNS,
    SUMMARY_COLUMNS,
    SWEEP_COLUMNS,
    SweepConfig,
    format_rows,
    parse_seeds,
    run_once,
    run_sweep,
    summarize,
    summary_path,
)
from .tracking import EpisodeConfig, run_episode

EXIT_OK, EXIT_USAGE, EXIT_CAPACITY, EXIT_BOUND = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _default_jobs() -> int:
    raw = os.environ.get("SWARMGUARD_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _writable(path: Path) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "a"):
            pass
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _csv_list(kind):
    def parse(text: str):
        return [kind(x) for x in text.split(",") if x.strip()]

    return parse


# --- subcommands ---------------------------------------------------------------


def cmd_gen(args) -> int:
    out = Path(args.out)
    _writable(out)
    scenario = generate_scenario(
        args.seed, args.robots, args.targets, Rect(*args.area), args.rc, args.alpha, Geometry(args.lt, args.lo)
    )
    save_scenario(scenario, out)
    print(f"wrote {out}", file=sys.stderr)
    return EXIT_OK


def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.rc_override is not None:
        scenario = scenario.with_comm_range(args.rc_override)
    if args.alpha is not None:
        scenario = scenario.with_attack_budget(args.alpha)
    row, result, removed = run_once(args.planner, scenario, args.attacker, args.attack_oracle, args.jobs)
    sys.stdout.write(format_rows([row], COLUMNS, header=args.header))
    if args.json:
        out = Path(args.json)
        _writable(out)
        payload = {
            "row": row,
            "assignment": {str(r): a for r, a in sorted(result.assignment.chosen.items())},
            "provenance": {str(r): p for r, p in sorted(result.assignment.provenance.items())},
            "cliques": [sorted(c) for c in result.partition.cliques],
            "messages_per_robot": list(result.stats.messages_per_robot),
            "evals_per_clique": list(result.stats.evals_per_clique),
            "attacked": list(removed),
        }
        if result.inference is not None:
            payload["alpha_per_clique"] = list(result.inference.alphas)
            payload["alpha_audit"] = result.inference.audit
        out.write_text(json.dumps(payload, indent=1) + "\n")
    return EXIT_OK


def _sweep_config(args) -> SweepConfig:
    if args.config:
        cfg = SweepConfig.from_file(args.config)
    else:
        missing = [flag for flag, v in (("--seeds", args.seeds), ("--robots", args.robots)) if v is None]
        if missing:
            raise UsageError(f"mc needs --config or {' and '.join(missing)}")
        cfg = SweepConfig(
            seeds=parse_seeds(args.seeds),
            n_robots=args.robots,
            comm_ranges=args.rc,
            alpha_rules=args.alpha_rules,
            planners=args.planners,
            attacker=args.attacker,
            n_targets=args.targets,
            area=list(args.area),
            attack_oracle=args.attack_oracle,
        )
    if args.out:
        cfg.output = args.out
    return cfg


def cmd_mc(args) -> int:
    cfg = _sweep_config(args)
    out = Path(cfg.output)
    summary_out = summary_path(out)
    _writable(out)
    _writable(summary_out)
    rows = run_sweep(cfg, jobs=args.jobs)
    out.write_text(format_rows(rows, SWEEP_COLUMNS))
    summary = format_rows(summarize(rows), SUMMARY_COLUMNS)
    summary_out.write_text(summary)
    failed = sum(r["status"] != "ok" for r in rows)
    print(f"{len(rows)} rows ({failed} failed) -> {out}", file=sys.stderr)
    sys.stdout.write(summary)
    return EXIT_OK


def cmd_episode(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.alpha is not None:
        scenario = scenario.with_attack_budget(args.alpha)
    config = EpisodeConfig.from_file(args.config) if args.config else EpisodeConfig()
    out = Path(args.out) if args.out else None
    if out:
        _writable(out)
    log = run_episode(scenario, args.planner, args.attacker, args.rounds, config, args.seed, args.jobs)
    if out:
        log.save(out)
    covered = log.covered()
    print("round,covered_pre,covered,n_cliques")
    for rec in log.records:
        print(f"{rec.round},{rec.covered_pre},{rec.covered},{rec.n_cliques}")
    print(f"mean covered after attack: {sum(covered) / len(covered):.3f}", file=sys.stderr)
    return EXIT_OK


def cmd_verify_bounds(args) -> int:
    checks = certify(args.instances, args.seed, args.max_robots, args.max_actions, args.max_alpha, args.targets)
    print("instance,planner,n,alpha,curvature,f_star,residual,ratio,bound,holds")
    violations = 0
    for c in checks:
        violations += not c.holds
        print(
            f"{c.instance},{c.planner},{c.n_robots},{c.alpha},{c.curvature:.6f},{c.f_star:g},"
            f"{c.residual:g},{c.ratio:.6f},{c.bound:.6f},{'yes' if c.holds else 'NO'}"
        )
    print(f"{len(checks)} checks over {args.instances} instances, {violations} violations", file=sys.stderr)
    return EXIT_BOUND if violations else EXIT_OK


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swarmguard", description="Attack-robust distributed multi-robot planning.")
    sub = parser.add_subparsers(dest="command", required=True)
    jobs = dict(type=int, default=_default_jobs(), help="worker limit (default: $SWARMGUARD_JOBS or 1)")

    g = sub.add_parser("gen", help="generate a random scenario file")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--robots", type=int, required=True)
    g.add_argument("--targets", type=int, default=100)
    g.add_argument("--rc", type=float, default=60.0, help="communication range")
    g.add_argument("--alpha", type=int, default=0, help="attack budget")
    g.add_argument("--area", type=float, nargs=4, default=[0.0, 0.0, 200.0, 200.0], metavar=("XMIN", "YMIN", "XMAX", "YMAX"))
    g.add_argument("--lt", type=float, default=10.0, help="sensing length along the motion axis")
    g.add_argument("--lo", type=float, default=3.0, help="sensing width")
    g.add_argument("--out", "-o", default="scenario.json")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="plan once, attack, print one CSV row")
    r.add_argument("--scenario", required=True)
    r.add_argument("--planner", choices=PLANNERS, required=True)
    r.add_argument("--attacker", choices=ATTACKERS, default="greedy")
    r.add_argument("--attack-oracle", choices=ATTACK_ORACLES, default="auto", help="DRM-UNA attack oracle")
    r.add_argument("--rc-override", type=float, default=None)
    r.add_argument("--alpha", type=int, default=None, help="override the scenario's attack budget")
    r.add_argument("--seed", type=int, default=None, help="accepted for uniformity; runs are deterministic")
    r.add_argument("--header", action="store_true", help="print the CSV header first")
    r.add_argument("--json", default=None, help="also write assignment, cliques and attack trace here")
    r.add_argument("--jobs", **jobs)
    r.set_defaults(func=cmd_run)

    m = sub.add_parser("mc", help="Monte Carlo sweep to CSV")
    m.add_argument("--config", default=None, help="JSON sweep configuration")
    m.add_argument("--seeds", default=None, help='e.g. "0-29" or "1,5,9"')
    m.add_argument("--seed", type=int, default=None, help="single-seed shorthand for --seeds")
    m.add_argument("--robots", type=_csv_list(int), default=None, help="comma list, e.g. 10,20")
    m.add_argument("--rc", type=_csv_list(float), default=[30.0, 60.0, 90.0])
    m.add_argument("--alpha-rules", type=_csv_list(str), default=["n/4", "n/2", "3n/4"])
    m.add_argument("--planners", type=_csv_list(str), default=["central-robust", "drm", "central-greedy"])
    m.add_argument("--attacker", choices=ATTACKERS, default="greedy")
    m.add_argument("--attack-oracle", choices=ATTACK_ORACLES, default="auto")
    m.add_argument("--targets", type=int, default=100)
    m.add_argument("--area", type=float, nargs=4, default=[0.0, 0.0, 200.0, 200.0])
    m.add_argument("--out", "-o", default=None)
    m.add_argument("--jobs", **jobs)
    m.set_defaults(func=cmd_mc)

    e = sub.add_parser("episode", help="multi-round tracking episode")
    e.add_argument("--scenario", required=True)
    e.add_argument("--planner", choices=PLANNERS, default="drm")
    e.add_argument("--attacker", choices=ATTACKERS, default="greedy")
    e.add_argument("--rounds", type=int, default=50)
    e.add_argument("--alpha", type=int, default=None)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--config", default=None, help="JSON motion/noise configuration")
    e.add_argument("--out", "-o", default=None, help="episode log (JSON)")
    e.add_argument("--jobs", **jobs)
    e.set_defaults(func=cmd_episode)

    v = sub.add_parser("verify-bounds", help="certify approximation bounds on small random instances")
    v.add_argument("--instances", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--max-robots", type=int, default=4)
    v.add_argument("--max-actions", type=int, default=3)
    v.add_argument("--max-alpha", type=int, default=2)
    v.add_argument("--targets", type=int, default=8)
    v.set_defaults(func=cmd_verify_bounds)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "mc" and args.seed is not None and args.seeds is None:
        args.seeds = str(args.seed)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc} (cap={exc.cap}, required={exc.required})", file=sys.stderr)
        return EXIT_CAPACITY
    except (UsageError, SwarmGuardError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
