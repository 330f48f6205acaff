"""Attack-robust multi-robot target coverage with distributed clique-based planning."""

from .attacks import AttackSet, greedy_attack, optimal_value, worst_case_attack
from .commgraph import CliquePartition, CommGraph, build_graph, dcp_partition, k_hop_neighbors
from .distributed import CommStats, PlanResult, drm, drm_una, idrm, plan
from .objective import CoverageObjective, curvature_exact, curvature_sampled
from .robust_core import Assignment, central_greedy, central_robust, myopic
from .scenario import Scenario, generate_scenario, load_scenario, save_scenario
from .tracking import run_episode

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "AttackSet",
    "CliquePartition",
    "CommGraph",
    "CommStats",
    "CoverageObjective",
    "PlanResult",
    "Scenario",
    "build_graph",
    "central_greedy",
    "central_robust",
    "curvature_exact",
    "curvature_sampled",
    "dcp_partition",
    "drm",
    "drm_una",
    "generate_scenario",
    "greedy_attack",
    "idrm",
    "k_hop_neighbors",
    "load_scenario",
    "myopic",
    "optimal_value",
    "plan",
    "run_episode",
    "save_scenario",
    "worst_case_attack",
]
