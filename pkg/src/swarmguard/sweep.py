"""Result rows and Monte Carlo sweeps over (seed x setting x planner) cells."""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from .attacks import apply_attacker
from .distributed import PLANNERS, PlanResult, plan
from .errors import InvalidParameterError, SwarmGuardError
from .objective import CoverageObjective
from .scenario import Geometry, Rect, Scenario, generate_scenario

COLUMNS = (
    "algo",
    "seed",
    "n",
    "r_c",
    "alpha",
    "K",
    "max_clique",
    "rounds",
    "msgs_total",
    "evals_max_clique",
    "parallel_time_s",
    "coverage_pre",
    "coverage_post",
)
SWEEP_COLUMNS = COLUMNS + ("status",)


def result_row(planner: str, scenario: Scenario, result: PlanResult, attack_residual: float, obj: CoverageObjective) -> dict:
    stats = result.stats
    return {
        "algo": planner,
        "seed": scenario.seed,
        "n": scenario.n_robots,
        "r_c": scenario.comm_range,
        "alpha": scenario.attack_budget,
        "K": result.partition.k,
        "max_clique": max(len(c) for c in result.partition.cliques),
        "rounds": stats.rounds,
        "msgs_total": stats.messages_total,
        "evals_max_clique": stats.evals_max_clique,
        "parallel_time_s": stats.parallel_time,
        "coverage_pre": int(obj.value_unchecked(result.assignment.actions())),
        "coverage_post": int(attack_residual),
    }


def run_once(
    planner: str,
    scenario: Scenario,
    attacker: str = "greedy",
    attack_oracle: str = "auto",
    jobs: int = 1,
) -> tuple[dict, PlanResult, tuple[int, ...]]:
    """Plan on the scenario's true targets, attack, and produce one CSV row."""
    obj = CoverageObjective.from_scenario(scenario)
    result = plan(planner, scenario, obj, attack_oracle=attack_oracle, jobs=jobs)
    attack = apply_attacker(attacker, obj.fork(), result.assignment, scenario.attack_budget)
    return result_row(planner, scenario, result, attack.residual_value, obj), result, attack.removed


def format_rows(rows: Sequence[dict], columns: Sequence[str] = COLUMNS, header: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    if header:
        writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# --- sweeps --------------------------------------------------------------------


def resolve_alpha(rule: str | int, n: int) -> int:
    """``n/4``, ``n/2``, ``3n/4`` (floored) or a fixed integer."""
    if isinstance(rule, int):
        alpha = rule
    else:
        text = str(rule).strip().replace(" ", "")
        fractions = {"n/4": (1, 4), "n/2": (1, 2), "3n/4": (3, 4), "n": (1, 1)}
        if text in fractions:
            num, den = fractions[text]
            alpha = (num * n) // den
        else:
            try:
                alpha = int(text)
            except ValueError:
                raise InvalidParameterError(f"unknown alpha rule {rule!r}") from None
    if not 0 <= alpha <= n:
        raise InvalidParameterError(f"alpha rule {rule!r} gives {alpha}, outside [0, {n}]")
    return alpha


def parse_seeds(text: str | Sequence[int]) -> list[int]:
    """``"0-29"``, ``"1,4,9"`` or a list of ints."""
    if not isinstance(text, str):
        return [int(s) for s in text]
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        elif part:
            seeds.append(int(part))
    return seeds


@dataclass
class SweepConfig:
    seeds: list[int]
    n_robots: list[int]
    comm_ranges: list[float]
    alpha_rules: list[str | int]
    planners: list[str]
    attacker: str = "greedy"
    n_targets: int = 100
    area: list[float] = field(default_factory=lambda: [0.0, 0.0, 200.0, 200.0])
    l_t: float = 10.0
    l_o: float = 3.0
    attack_oracle: str = "auto"
    output: str = "results.csv"

    def __post_init__(self):
        if not self.seeds:
            raise InvalidParameterError("sweep needs at least one seed")
        if not self.planners:
            raise InvalidParameterError("sweep needs at least one planner")
        if not self.n_robots or not self.comm_ranges or not self.alpha_rules:
            raise InvalidParameterError("sweep needs robot counts, comm ranges and alpha rules")
        for p in self.planners:
            if p.replace("_", "-") not in PLANNERS:
                raise InvalidParameterError(f"unknown planner {p!r}")
        for n in self.n_robots:
            for rule in self.alpha_rules:
                resolve_alpha(rule, n)

    @classmethod
    def from_file(cls, path: str | Path) -> "SweepConfig":
        data = json.loads(Path(path).read_text())
        if "seeds" in data:
            data["seeds"] = parse_seeds(data["seeds"])
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidParameterError(f"unknown sweep config keys: {sorted(unknown)}")
        return cls(**data)

    def cells(self) -> list[tuple]:
        out = []
        for n in self.n_robots:
            for rc in self.comm_ranges:
                for rule in self.alpha_rules:
                    for seed in self.seeds:
                        for planner in self.planners:
                            out.append((seed, n, rc, resolve_alpha(rule, n), planner))
        return out


def _run_cell(args) -> dict:
    cfg_dict, (seed, n, rc, alpha, planner) = args
    cfg = SweepConfig(**cfg_dict)
    scenario = generate_scenario(
        seed, n, cfg.n_targets, Rect(*cfg.area), rc, alpha, Geometry(cfg.l_t, cfg.l_o)
    )
    try:
        row, _, _ = run_once(planner, scenario, cfg.attacker, cfg.attack_oracle)
        row["status"] = "ok"
    except SwarmGuardError as exc:
        row = {"algo": planner, "seed": seed, "n": n, "r_c": rc, "alpha": alpha, "status": f"failed: {exc}"}
    return row


def run_sweep(cfg: SweepConfig, jobs: int = 1) -> list[dict]:
    """All rows in deterministic cell order, regardless of completion order."""
    tasks = [(asdict(cfg), cell) for cell in cfg.cells()]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_cell, tasks))
    return [_run_cell(t) for t in tasks]


SUMMARY_METRICS = ("K", "max_clique", "msgs_total", "evals_max_clique", "parallel_time_s", "coverage_pre", "coverage_post")


def summarize(rows: Sequence[dict]) -> list[dict]:
    """Per (algo, n, r_c, alpha) means over successful rows."""
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        key = (row["algo"], int(row["n"]), float(row["r_c"]), int(row["alpha"]))
        groups.setdefault(key, []).append(row)
    summary = []
    for (algo, n, rc, alpha), members in groups.items():
        ok = [r for r in members if r.get("status", "ok") == "ok"]
        entry = {"algo": algo, "n": n, "r_c": rc, "alpha": alpha, "runs": len(ok), "failed": len(members) - len(ok)}
        for metric in SUMMARY_METRICS:
            entry[f"mean_{metric}"] = statistics.fmean(float(r[metric]) for r in ok) if ok else math.nan
        summary.append(entry)
    return summary


SUMMARY_COLUMNS = ("algo", "n", "r_c", "alpha", "runs", "failed") + tuple(f"mean_{m}" for m in SUMMARY_METRICS)


def summary_path(output: str | Path) -> Path:
    output = Path(output)
    return output.with_name(output.stem + ".summary.csv")
