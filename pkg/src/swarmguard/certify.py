"""Exhaustive certification of the approximation bounds on small random instances.

For every instance the exact curvature, the exact max-min optimum f* and
exact worst-case attacks are computed, and the post-attack value of each
planner is compared with its guaranteed fraction of f*:
``(1 - curvature) / 2`` for DRM and IDRM, ``1 - curvature`` for myopic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attacks import optimal_value, worst_case_attack
from .commgraph import CommGraph
from .distributed import plan
from .objective import CoverageObjective, curvature_exact, random_coverage_objective
from .scenario import make_scenario

BOUND_FACTORS = {"drm": 0.5, "idrm": 0.5, "myopic": 1.0}
EPS = 1e-12


@dataclass
class BoundCheck:
    instance: int
    planner: str
    n_robots: int
    alpha: int
    curvature: float
    f_star: float
    residual: float
    bound: float

    @property
    def ratio(self) -> float:
        return self.residual / self.f_star if self.f_star > 0 else 1.0

    @property
    def holds(self) -> bool:
        return self.residual + EPS >= self.bound * self.f_star


def random_instance(rng: np.random.Generator, max_robots: int, max_actions: int, max_alpha: int, n_targets: int):
    n = int(rng.integers(1, max_robots + 1))
    obj = random_coverage_objective(rng, n, max_actions, n_targets, cover_prob=float(rng.uniform(0.15, 0.6)))
    edge_prob = float(rng.uniform(0.0, 1.0))
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < edge_prob]
    graph = CommGraph.from_edges(n, edges)
    alpha = int(rng.integers(0, min(max_alpha, n) + 1))
    return obj, graph, alpha


def certify_instance(index: int, obj: CoverageObjective, graph: CommGraph, alpha: int) -> list[BoundCheck]:
    n = graph.n
    scenario = make_scenario([(0.0, 0.0)] * n, comm_range=1.0, attack_budget=alpha)
    nu = curvature_exact(obj).value
    f_star, _ = optimal_value(obj, alpha)
    checks = []
    for planner, factor in BOUND_FACTORS.items():
        result = plan(planner, scenario, obj, alpha=alpha, graph=graph)
        residual = worst_case_attack(obj, result.assignment, alpha).residual_value
        checks.append(BoundCheck(index, planner, n, alpha, nu, f_star, residual, factor * (1.0 - nu)))
    return checks


def certify(
    n_instances: int = 100,
    seed: int = 0,
    max_robots: int = 4,
    max_actions: int = 3,
    max_alpha: int = 2,
    n_targets: int = 8,
) -> list[BoundCheck]:
    rng = np.random.default_rng(seed)
    checks = []
    for k in range(n_instances):
        obj, graph, alpha = random_instance(rng, max_robots, max_actions, max_alpha, n_targets)
        checks.extend(certify_instance(k, obj, graph, alpha))
    return checks
