"""Distributed robust maximisation: DRM, IDRM and DRM-UNA.

Every variant partitions the communication graph into cliques with the
three-round protocol of :mod:`swarmguard.commgraph`, then lets each clique run
the bait+greedy routine on its own robots.  The variants differ only in how
many attacks each clique prepares for:

* DRM: ``min(alpha, |C_k|)`` (or an injected per-clique vector);
* IDRM: DRM's count, decremented for every bait robot that is not among the
  top ``alpha`` robots within its three-hop neighbourhood;
* DRM-UNA: the count maximising the clique's average post-attack value over
  every possible attack count, ``alpha`` being unknown.

Cliques are logically parallel.  ``parallel_time`` is the protocol's
per-round slowest-robot compute time plus the slowest clique's measured
optimisation time, independent of how many worker threads actually ran.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .attacks import greedy_profile, removal_count, worst_case_profile
from .commgraph import CliquePartition, CommGraph, DcpResult, SyncNetwork, build_graph, dcp_partition, k_hop_neighbors
from .errors import CapacityError, InvalidParameterError
from .objective import CoverageObjective
from .robust_core import Assignment, central_greedy, central_robust, myopic, rank_robots
from .scenario import Scenario

UNA_EXACT_CAP = 10**5


@dataclass
class CommStats:
    rounds: int
    messages_per_robot: list[int]
    evals_per_clique: list[int]
    partition_time: float = 0.0
    clique_times: list[float] = field(default_factory=list)
    total_time: float = 0.0

    @property
    def parallel_time(self) -> float:
        return self.partition_time + max(self.clique_times, default=0.0)

    @property
    def messages_total(self) -> int:
        return sum(self.messages_per_robot)

    @property
    def evals_max_clique(self) -> int:
        return max(self.evals_per_clique, default=0)


@dataclass
class AlphaInference:
    alphas: list[int]
    audit: list[dict] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(self.alphas)


@dataclass
class PlanResult:
    assignment: Assignment
    partition: CliquePartition
    stats: CommStats
    inference: AlphaInference | None = None

    def __iter__(self):
        # allows ``assignment, partition, stats, inference = drm(...)``
        return iter((self.assignment, self.partition, self.stats, self.inference))


def _graph_for(scenario: Scenario, graph: CommGraph | None) -> CommGraph:
    if graph is None:
        return build_graph(scenario.robot_positions(), scenario.comm_range)
    if graph.n != scenario.n_robots:
        raise InvalidParameterError("graph size does not match the scenario")
    return graph


def _intra_clique_round(graph: CommGraph, partition: CliquePartition, obj: CoverageObjective) -> list[int]:
    """Every robot sends its action coverage to the rest of its clique (one round)."""
    net = SyncNetwork(graph)
    for members in partition.cliques:
        for i in members:
            payload = {a: obj.masks[a] for a in obj.actions_of(i)}
            net.broadcast(i, payload, to=[j for j in members if j != i])
    net.deliver()
    return net.sent


CliqueTask = Callable[[tuple[int, ...], CoverageObjective], Assignment]


def _run_cliques(
    partition: CliquePartition, obj: CoverageObjective, task: CliqueTask, jobs: int = 1
) -> tuple[Assignment, list[int], list[float]]:
    def one(members):
        local = obj.fork()
        t0 = time.perf_counter()
        result = task(members, local)
        return result, local.evaluations, time.perf_counter() - t0

    if jobs > 1 and partition.k > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(one, partition.cliques))
    else:
        outputs = [one(members) for members in partition.cliques]
    merged = Assignment()
    for result, _, _ in outputs:
        merged.merge(result)
    merged.chosen = dict(sorted(merged.chosen.items()))
    merged.provenance = dict(sorted(merged.provenance.items()))
    return merged, [o[1] for o in outputs], [o[2] for o in outputs]


def _finish(
    graph: CommGraph,
    dcp: DcpResult,
    obj: CoverageObjective,
    task: CliqueTask,
    jobs: int,
    started: float,
    inference: AlphaInference | None = None,
    extra_partition_time: float = 0.0,
) -> PlanResult:
    partition = dcp.partition
    intra = _intra_clique_round(graph, partition, obj)
    assignment, evals, times = _run_cliques(partition, obj, task, jobs)
    stats = CommStats(
        rounds=dcp.rounds + 1,
        messages_per_robot=[a + b for a, b in zip(dcp.messages, intra)],
        evals_per_clique=evals,
        partition_time=dcp.parallel_compute_time + extra_partition_time,
        clique_times=times,
        total_time=time.perf_counter() - started,
    )
    return PlanResult(assignment, partition, stats, inference)


def drm_alphas(partition: CliquePartition, alpha: int) -> list[int]:
    return [min(alpha, len(c)) for c in partition.cliques]


def drm(
    scenario: Scenario,
    obj: CoverageObjective,
    *,
    alpha: int | None = None,
    graph: CommGraph | None = None,
    clique_alphas: Sequence[int] | None = None,
    jobs: int = 1,
) -> PlanResult:
    """Distributed robust maximisation with a known attack budget.

    ``clique_alphas`` injects a per-clique attack count (ordered like
    ``partition.cliques``); it must sum to at least ``alpha`` and respect each
    clique's size.
    """
    started = time.perf_counter()
    alpha = scenario.attack_budget if alpha is None else alpha
    if alpha < 0:
        raise InvalidParameterError("alpha must be >= 0")
    graph = _graph_for(scenario, graph)
    dcp = dcp_partition(graph)
    partition = dcp.partition
    if clique_alphas is None:
        alphas = drm_alphas(partition, alpha)
    else:
        alphas = list(clique_alphas)
        if len(alphas) != partition.k:
            raise InvalidParameterError(f"expected {partition.k} clique alphas, got {len(alphas)}")
        if any(not 0 <= a <= len(c) for a, c in zip(alphas, partition.cliques)):
            raise InvalidParameterError("each clique alpha must lie in [0, |C_k|]")
        if sum(alphas) < min(alpha, graph.n):
            raise InvalidParameterError("clique alphas must sum to at least alpha")
    by_clique = dict(zip(partition.cliques, alphas))
    inference = AlphaInference(alphas)
    return _finish(graph, dcp, obj, lambda m, o: central_robust(m, o, by_clique[m]), jobs, started, inference)


def _top_key(scores: dict[int, float]):
    return lambda r: (-scores[r], r)


def infer_alpha_known(
    partition: CliquePartition,
    graph: CommGraph,
    obj: CoverageObjective,
    alpha: int,
    scores: dict[int, float] | None = None,
    neighborhoods: dict[int, set[int]] | None = None,
) -> AlphaInference:
    """Per-clique attack counts refined with three-hop comparisons.

    ``scores`` maps robot -> best single-action value and
    ``neighborhoods`` maps robot -> its three-hop neighbours; both are
    computed centrally when not supplied by the message-passing run.
    """
    if alpha < 0:
        raise InvalidParameterError("alpha must be >= 0")
    if scores is None:
        scores = {r: v for r, _, v in rank_robots(range(graph.n), obj)}
    key = _top_key(scores)
    alphas, audit = [], []
    for k, members in enumerate(partition.cliques):
        start = min(alpha, len(members))
        count = start
        selected = sorted(members, key=key)[:start]
        for r in sorted(selected):
            hood = neighborhoods[r] if neighborhoods is not None else k_hop_neighbors(graph, r, 3)
            pool = sorted(set(hood) | {r}, key=key)
            rank = pool.index(r)
            demoted = rank >= alpha
            if demoted:
                count -= 1
            audit.append({"clique": k, "robot": r, "rank_in_3hop": rank, "pool_size": len(pool), "demoted": demoted})
        alphas.append(count)
    return AlphaInference(alphas, audit)


def idrm(
    scenario: Scenario,
    obj: CoverageObjective,
    *,
    alpha: int | None = None,
    graph: CommGraph | None = None,
    jobs: int = 1,
) -> PlanResult:
    """DRM with three-hop attack-count inference.

    Best single-action values ride on the three partition rounds, so IDRM
    uses the same rounds and message counts as DRM with larger payloads.
    """
    started = time.perf_counter()
    alpha = scenario.attack_budget if alpha is None else alpha
    graph = _graph_for(scenario, graph)
    scorer = obj.fork()
    scores, score_time = {}, 0.0
    for r in range(graph.n):
        t0 = time.perf_counter()
        scores[r] = scorer.best_single_action(r)[1]
        score_time = max(score_time, time.perf_counter() - t0)
    dcp = dcp_partition(graph, payloads=[scores[i] for i in range(graph.n)])
    neighborhoods = {i: set(dcp.relayed[i]) - {i} for i in range(graph.n)}
    t0 = time.perf_counter()
    inference = infer_alpha_known(dcp.partition, graph, obj, alpha, scores, neighborhoods)
    infer_time = time.perf_counter() - t0
    by_clique = dict(zip(dcp.partition.cliques, inference.alphas))
    return _finish(
        graph,
        dcp,
        obj,
        lambda m, o: central_robust(m, o, by_clique[m]),
        jobs,
        started,
        inference,
        extra_partition_time=score_time + infer_time,
    )


ATTACK_ORACLES = ("auto", "exact", "greedy")


def infer_alpha_unknown(
    clique: Sequence[int], obj: CoverageObjective, attack_oracle: str = "auto", cap: int = UNA_EXACT_CAP
) -> AlphaInference:
    """Attack count for one clique maximising the average post-attack value.

    For every conjectured count ``a`` the clique's bait+greedy assignment is
    scored by summing its residual value over every attack budget ``0..|C|``
    and dividing by ``|C|``; the smallest maximiser wins.
    """
    members = tuple(sorted(clique))
    n = len(members)
    if attack_oracle not in ATTACK_ORACLES:
        raise InvalidParameterError(f"unknown attack oracle {attack_oracle!r}")
    if attack_oracle == "auto":
        attack_oracle = "exact" if removal_count(n, n) <= cap else "greedy"
    elif attack_oracle == "exact" and removal_count(n, n) > cap:
        raise CapacityError(f"exact attacks on a clique of {n} robots; use the greedy oracle", cap, removal_count(n, n))

    averages = []
    for a in range(n + 1):
        S = central_robust(members, obj, a)
        if attack_oracle == "exact":
            profile = worst_case_profile(obj, S, n, cap)
        else:
            profile = greedy_profile(obj, S, n)
        total = sum(p.residual_value for p in profile)
        averages.append(total / n if n else total)
    best = max(range(n + 1), key=lambda a: (averages[a], -a))
    return AlphaInference([best], [{"clique": members, "oracle": attack_oracle, "averages": averages}])


def drm_una(
    scenario: Scenario,
    obj: CoverageObjective,
    *,
    attack_oracle: str = "auto",
    graph: CommGraph | None = None,
    jobs: int = 1,
) -> PlanResult:
    """DRM with each clique inferring its own attack count; ``scenario.attack_budget`` is ignored."""
    started = time.perf_counter()
    graph = _graph_for(scenario, graph)
    dcp = dcp_partition(graph)
    inferred: dict[tuple[int, ...], AlphaInference] = {}

    def task(members, local):
        inf = infer_alpha_unknown(members, local, attack_oracle)
        inferred[members] = inf
        return central_robust(members, local, inf.alphas[0])

    result = _finish(graph, dcp, obj, task, jobs, started)
    cliques = dcp.partition.cliques
    result.inference = AlphaInference(
        [inferred[c].alphas[0] for c in cliques], [inferred[c].audit[0] for c in cliques]
    )
    return result


# --- uniform planner entry point ---------------------------------------------

PLANNERS = ("central-greedy", "central-robust", "drm", "idrm", "drm-una", "myopic")


def _central(scenario: Scenario, obj: CoverageObjective, routine) -> PlanResult:
    local = obj.fork()
    t0 = time.perf_counter()
    assignment = routine(local)
    elapsed = time.perf_counter() - t0
    n = scenario.n_robots
    partition = CliquePartition.from_groups(n, [range(n)])
    stats = CommStats(0, [0] * n, [local.evaluations], 0.0, [elapsed], elapsed)
    return PlanResult(assignment, partition, stats)


def plan(
    planner: str,
    scenario: Scenario,
    obj: CoverageObjective,
    *,
    alpha: int | None = None,
    graph: CommGraph | None = None,
    attack_oracle: str = "auto",
    jobs: int = 1,
) -> PlanResult:
    """Run any supported planner by name (underscores and hyphens are interchangeable)."""
    name = planner.replace("_", "-")
    alpha = scenario.attack_budget if alpha is None else alpha
    robots = range(scenario.n_robots)
    if name == "central-greedy":
        return _central(scenario, obj, lambda o: central_greedy(robots, o))
    if name == "central-robust":
        return _central(scenario, obj, lambda o: central_robust(robots, o, min(alpha, scenario.n_robots)))
    if name == "myopic":
        started = time.perf_counter()
        n = scenario.n_robots
        partition = CliquePartition.from_groups(n, [[i] for i in range(n)])
        assignment, evals, times = _run_cliques(partition, obj, lambda m, o: myopic(m, o))
        stats = CommStats(0, [0] * n, evals, 0.0, times, time.perf_counter() - started)
        return PlanResult(assignment, partition, stats)
    if name == "drm":
        return drm(scenario, obj, alpha=alpha, graph=graph, jobs=jobs)
    if name == "idrm":
        return idrm(scenario, obj, alpha=alpha, graph=graph, jobs=jobs)
    if name == "drm-una":
        return drm_una(scenario, obj, attack_oracle=attack_oracle, graph=graph, jobs=jobs)
    raise InvalidParameterError(f"unknown planner {planner!r}; choose from {', '.join(PLANNERS)}")
