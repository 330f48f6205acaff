"""Centralized assignment routines: greedy, bait+greedy robust, and myopic.

All argmax selections break ties by smallest robot id, then smallest action
id.  With the integer-valued coverage objective comparisons are exact; for
real-valued objectives values within ``VALUE_TOL`` count as ties.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import InvalidParameterError
from .objective import CoverageObjective

VALUE_TOL = 1e-9

BAIT, GREEDY, MYOPIC = "bait", "greedy", "myopic"


@dataclass
class Assignment:
    chosen: dict[int, int] = field(default_factory=dict)
    provenance: dict[int, str] = field(default_factory=dict)

    def actions(self) -> list[int]:
        return [self.chosen[r] for r in sorted(self.chosen)]

    def merge(self, other: "Assignment") -> None:
        overlap = set(self.chosen) & set(other.chosen)
        if overlap:
            raise InvalidParameterError(f"robots {sorted(overlap)} assigned twice")
        self.chosen.update(other.chosen)
        self.provenance.update(other.provenance)

    def __len__(self) -> int:
        return len(self.chosen)


def _better(value: float, best: float) -> bool:
    return value > best + VALUE_TOL


def central_greedy(robots: Iterable[int], obj: CoverageObjective, tag: str = GREEDY) -> Assignment:
    """Sequential greedy: repeatedly assign the (robot, action) pair of largest marginal gain."""
    remaining = sorted(set(robots))
    result = Assignment()
    state = obj.empty_state()
    while remaining:
        best_pair, best_gain = None, -float("inf")
        for r in remaining:
            actions = obj.actions_of(r)
            if not actions:
                raise InvalidParameterError(f"robot {r} has no actions")
            for a in actions:
                g = obj.gain(state, a)
                if _better(g, best_gain):
                    best_pair, best_gain = (r, a), g
        r, a = best_pair
        result.chosen[r] = a
        result.provenance[r] = tag
        state = obj.add(state, a)
        remaining.remove(r)
    return result


def rank_robots(robots: Iterable[int], obj: CoverageObjective) -> list[tuple[int, int, float]]:
    """Robots sorted by their best single-action value, descending.

    Returns ``(robot, best_action, value)`` triples; equal values keep
    ascending robot id order.
    """
    scored = []
    for r in sorted(set(robots)):
        a, v = obj.best_single_action(r)
        scored.append((r, a, v))
    # stable sort keeps robot-id order among ties
    scored.sort(key=lambda t: -t[2])
    return scored


def central_robust(robots: Iterable[int], obj: CoverageObjective, n_attacks: int) -> Assignment:
    """Bait the ``n_attacks`` strongest robots, then greedy on the rest as if baits were absent."""
    robots = sorted(set(robots))
    if not 0 <= n_attacks <= len(robots):
        raise InvalidParameterError(f"number of attacks must lie in [0, {len(robots)}], got {n_attacks}")
    result = Assignment()
    ranked = rank_robots(robots, obj)
    for r, a, _ in ranked[:n_attacks]:
        result.chosen[r] = a
        result.provenance[r] = BAIT
    rest = [r for r, _, _ in ranked[n_attacks:]]
    result.merge(central_greedy(rest, obj))
    return result


def myopic(robots: Iterable[int], obj: CoverageObjective) -> Assignment:
    """Every robot independently takes its individually best action."""
    result = Assignment()
    for r in sorted(set(robots)):
        a, _ = obj.best_single_action(r)
        result.chosen[r] = a
        result.provenance[r] = MYOPIC
    return result
