"""Adversary models and the brute-force optimum of the max-min assignment problem."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import CapacityError, InvalidParameterError
from .objective import CoverageObjective
from .robust_core import Assignment

DEFAULT_ATTACK_CAP = 10**6


@dataclass(frozen=True)
class AttackSet:
    removed: tuple[int, ...]
    residual_value: float


def _as_actions(S: Assignment | Iterable[int]) -> list[int]:
    if isinstance(S, Assignment):
        return sorted(S.chosen.values())
    return sorted(S)


def removal_count(n: int, alpha: int) -> int:
    """Number of removal sets of size at most ``alpha`` from ``n`` actions."""
    return sum(math.comb(n, a) for a in range(min(alpha, n) + 1))


def worst_case_profile(
    obj: CoverageObjective, S: Assignment | Iterable[int], max_alpha: int, cap: int = DEFAULT_ATTACK_CAP
) -> list[AttackSet]:
    """Exact worst-case removals for every budget ``0..max_alpha`` in one enumeration.

    The objective is monotone, so a budget-``b`` attacker loses nothing by
    removing exactly ``min(b, |S|)`` actions; entry ``b`` minimises f(S - A)
    over those removal sets, ties going to the lexicographically smallest
    sorted removal tuple.
    """
    if max_alpha < 0:
        raise InvalidParameterError("attack budget must be >= 0")
    actions = _as_actions(S)
    n = len(actions)
    top = min(max_alpha, n)
    required = removal_count(n, top)
    if required > cap:
        raise CapacityError("worst-case attack enumeration too large; use greedy_attack", cap, required)

    masks = [obj.masks[a] for a in actions]
    # seg[i][j] = OR of masks[i:j]
    seg = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(n):
        acc = 0
        for j in range(i, n):
            acc |= masks[j]
            seg[i][j + 1] = acc

    per_size: list[tuple[int, tuple[int, ...]]] = []
    for size in range(top + 1):
        best_val, best_combo = None, None
        for combo in itertools.combinations(range(n), size):
            kept, prev = 0, 0
            for c in combo:
                kept |= seg[prev][c]
                prev = c + 1
            kept |= seg[prev][n]
            v = kept.bit_count()
            if best_val is None or v < best_val:
                best_val, best_combo = v, combo
        obj.evaluations += math.comb(n, size)
        per_size.append((best_val, tuple(actions[c] for c in best_combo)))

    return [AttackSet(per_size[min(b, top)][1], float(per_size[min(b, top)][0])) for b in range(max_alpha + 1)]


def worst_case_attack(
    obj: CoverageObjective, S: Assignment | Iterable[int], alpha: int, cap: int = DEFAULT_ATTACK_CAP
) -> AttackSet:
    """Exact minimiser of f(S - A) over all ``A`` within ``S`` with ``|A| <= alpha``."""
    return worst_case_profile(obj, S, alpha, cap)[alpha]


def greedy_attack(obj: CoverageObjective, S: Assignment | Iterable[int], alpha: int) -> AttackSet:
    """Remove, ``alpha`` times, the action whose loss hurts f the most (ties: smallest id)."""
    if alpha < 0:
        raise InvalidParameterError("attack budget must be >= 0")
    return greedy_profile(obj, S, alpha)[alpha]


def greedy_profile(obj: CoverageObjective, S: Assignment | Iterable[int], max_alpha: int) -> list[AttackSet]:
    """Greedy attacks for every budget ``0..max_alpha``.

    The greedy removal order does not depend on the budget, so budget ``b``
    is the first ``b`` removals of a single run.
    """
    current = _as_actions(S)
    removed: list[int] = []
    profile = [AttackSet((), obj.value_unchecked(current))]
    for _ in range(max_alpha):
        if current:
            best, best_val = None, None
            for x in current:
                v = obj.value_unchecked(a for a in current if a != x)
                if best_val is None or v < best_val:
                    best, best_val = x, v
            current.remove(best)
            removed.append(best)
            profile.append(AttackSet(tuple(sorted(removed)), best_val))
        else:
            profile.append(profile[-1])
    return profile


ATTACKERS = ("worst_case", "greedy", "none")


def apply_attacker(
    attacker: str, obj: CoverageObjective, S: Assignment | Iterable[int], alpha: int, cap: int = DEFAULT_ATTACK_CAP
) -> AttackSet:
    if attacker == "worst_case":
        return worst_case_attack(obj, S, alpha, cap)
    if attacker == "greedy":
        return greedy_attack(obj, S, alpha)
    if attacker == "none":
        return AttackSet((), obj.value_unchecked(_as_actions(S)))
    raise InvalidParameterError(f"unknown attacker {attacker!r}")


def optimal_value(
    obj: CoverageObjective, alpha: int, robots: Sequence[int] | None = None, cap: int = DEFAULT_ATTACK_CAP
) -> tuple[float, Assignment]:
    """f*: the best worst-case residual over all complete assignments, by exhaustive search."""
    robots = obj.robots if robots is None else tuple(sorted(robots))
    n = len(robots)
    required = math.prod(len(obj.actions_of(r)) for r in robots) * removal_count(n, alpha)
    if required > cap:
        raise CapacityError("optimal value enumeration too large", cap, required)
    best_val, best_combo = None, None
    for combo in itertools.product(*(obj.actions_of(r) for r in robots)):
        v = worst_case_profile(obj, combo, alpha, cap)[alpha].residual_value
        if best_val is None or v > best_val:
            best_val, best_combo = v, combo
    assignment = Assignment(dict(zip(robots, best_combo)), {r: "optimal" for r in robots})
    return best_val, assignment
