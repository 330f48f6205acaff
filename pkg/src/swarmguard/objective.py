"""Coverage objective: number of distinct targets covered by a set of actions.

Each action's covered targets are stored as a Python ``int`` bitmask, so the
value of an action set is the popcount of the OR of its masks.  Algorithms
interact with the objective incrementally through an opaque *state* (the
running mask) via :meth:`CoverageObjective.gain` and
:meth:`CoverageObjective.add`, which keeps greedy loops cheap and lets every
objective evaluation be counted.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CapacityError, FeasibilityError, InvalidParameterError
from .scenario import Scenario

DEFAULT_CURVATURE_CAP = 10**6


class CoverageObjective:
    """Monotone submodular coverage function over robot actions.

    Args:
        coverage: action id -> iterable of covered target indices.
        owner: action id -> robot id.
        n_targets: size of the target universe (defaults to 1 + max index).
    """

    def __init__(
        self,
        coverage: Mapping[int, Iterable[int]],
        owner: Mapping[int, int],
        n_targets: int | None = None,
    ):
        if set(coverage) != set(owner):
            raise InvalidParameterError("coverage and owner must describe the same actions")
        masks = {}
        top = -1
        for action, targets in coverage.items():
            m = 0
            for t in targets:
                m |= 1 << int(t)
                top = max(top, int(t))
            masks[action] = m
        self.masks: dict[int, int] = masks
        self.owner: dict[int, int] = dict(owner)
        self.n_targets = n_targets if n_targets is not None else top + 1
        by_robot: dict[int, list[int]] = {}
        for action in sorted(self.owner):
            by_robot.setdefault(self.owner[action], []).append(action)
        self._by_robot = {r: tuple(a) for r, a in sorted(by_robot.items())}
        self.evaluations = 0

    @classmethod
    def from_scenario(cls, scenario: Scenario, target_positions: np.ndarray | None = None) -> "CoverageObjective":
        """Coverage of ``target_positions`` (defaults to the scenario's true targets) by each action region."""
        points = scenario.target_positions() if target_positions is None else np.asarray(target_positions, float)
        points = points.reshape(-1, 2)
        coverage, owner = {}, {}
        for action in scenario.actions.values():
            coverage[action.id] = np.flatnonzero(action.region.contains(points)).tolist()
            owner[action.id] = action.owner
        return cls(coverage, owner, n_targets=len(points))

    def fork(self) -> "CoverageObjective":
        """Shallow copy sharing the coverage tables, with its own evaluation counter."""
        twin = object.__new__(CoverageObjective)
        twin.masks = self.masks
        twin.owner = self.owner
        twin.n_targets = self.n_targets
        twin._by_robot = self._by_robot
        twin.evaluations = 0
        return twin

    # -- structure --------------------------------------------------------

    @property
    def robots(self) -> tuple[int, ...]:
        return tuple(self._by_robot)

    def actions_of(self, robot: int) -> tuple[int, ...]:
        return self._by_robot.get(robot, ())

    def covered_targets(self, action: int) -> frozenset[int]:
        m = self.masks[action]
        return frozenset(i for i in range(m.bit_length()) if m >> i & 1)

    def check_feasible(self, actions: Iterable[int]) -> None:
        seen = {}
        for a in actions:
            if a not in self.owner:
                raise FeasibilityError(f"unknown action {a}")
            r = self.owner[a]
            if r in seen and seen[r] != a:
                raise FeasibilityError(f"robot {r} holds two actions ({seen[r]}, {a})")
            seen[r] = a

    # -- incremental interface ------------------------------------------------

    def empty_state(self) -> int:
        return 0

    def add(self, state: int, action: int) -> int:
        return state | self.masks[action]

    def state_value(self, state: int) -> float:
        return float(state.bit_count())

    def state_of(self, actions: Iterable[int]) -> int:
        m = 0
        for a in actions:
            m |= self.masks[a]
        return m

    def gain(self, state: int, action: int) -> float:
        """Marginal value of ``action`` on top of ``state``; counts one evaluation."""
        self.evaluations += 1
        return float((state | self.masks[action]).bit_count() - state.bit_count())

    def singleton_value(self, action: int) -> float:
        self.evaluations += 1
        return float(self.masks[action].bit_count())

    def value_unchecked(self, actions: Iterable[int]) -> float:
        self.evaluations += 1
        return float(self.state_of(actions).bit_count())

    # -- set-function interface --------------------------------------------

    def evaluate(self, actions: Iterable[int]) -> float:
        """f(S): number of distinct targets covered by the actions in ``S``."""
        actions = list(actions)
        self.check_feasible(actions)
        return self.value_unchecked(actions)

    def marginal_gain(self, actions: Iterable[int], action: int) -> float:
        """f(S + x) - f(S)."""
        actions = list(actions)
        if action in actions:
            raise InvalidParameterError(f"action {action} already in the set")
        self.check_feasible(actions + [action])
        self.evaluations += 2
        base = self.state_of(actions)
        return float((base | self.masks[action]).bit_count() - base.bit_count())

    def best_single_action(self, robot: int) -> tuple[int, float]:
        """Robot's individually best action; ties go to the smallest action id."""
        best, best_value = None, -math.inf
        for a in self.actions_of(robot):
            v = self.singleton_value(a)
            if v > best_value:
                best, best_value = a, v
        if best is None:
            raise InvalidParameterError(f"robot {robot} has no actions")
        return best, best_value


def random_coverage_objective(
    rng: np.random.Generator,
    n_robots: int,
    max_actions: int,
    n_targets: int,
    cover_prob: float = 0.35,
    nonzero: bool = True,
) -> CoverageObjective:
    """Random abstract coverage instance; every robot gets 1..max_actions actions.

    With ``nonzero`` each action covers at least one target, which is the
    standing assumption f({x}) > 0 of the curvature definition.
    """
    coverage, owner = {}, {}
    next_id = 0
    for r in range(n_robots):
        for _ in range(int(rng.integers(1, max_actions + 1))):
            covered = np.flatnonzero(rng.random(n_targets) < cover_prob).tolist()
            if nonzero and not covered:
                covered = [int(rng.integers(n_targets))]
            coverage[next_id] = covered
            owner[next_id] = r
            next_id += 1
    return CoverageObjective(coverage, owner, n_targets=n_targets)


# --- curvature ----------------------------------------------------------------


@dataclass(frozen=True)
class Curvature:
    value: float
    witness: tuple[frozenset[int], int] | None
    exact: bool
    sets_inspected: int


def _partial_assignment_count(obj: CoverageObjective, robots: Sequence[int]) -> int:
    return math.prod(len(obj.actions_of(r)) + 1 for r in robots)


def _scan(obj: CoverageObjective, assignments: Iterable[Sequence[int]]):
    """Minimum normalised marginal ratio over the given action sets."""
    best_ratio, witness, inspected = 1.0, None, 0
    masks = obj.masks
    for chosen in assignments:
        inspected += 1
        if not chosen:
            continue
        full = 0
        for a in chosen:
            full |= masks[a]
        f_full = full.bit_count()
        for x in chosen:
            single = masks[x].bit_count()
            if single == 0:
                continue
            rest = 0
            for a in chosen:
                if a != x:
                    rest |= masks[a]
            ratio = (f_full - rest.bit_count()) / single
            if witness is None or ratio < best_ratio:
                best_ratio, witness = ratio, (frozenset(chosen), x)
    return best_ratio, witness, inspected


def curvature_exact(
    obj: CoverageObjective, robots: Sequence[int] | None = None, cap: int = DEFAULT_CURVATURE_CAP
) -> Curvature:
    """Total curvature over all feasible partial assignments (at most one action per robot).

    Actions with f({x}) = 0 are skipped.  If no action has positive value the
    curvature is reported as 0 with no witness.
    """
    robots = obj.robots if robots is None else tuple(robots)
    total = _partial_assignment_count(obj, robots)
    if total > cap:
        raise CapacityError("exact curvature enumeration too large; use curvature_sampled", cap, total)
    options = [(None, *obj.actions_of(r)) for r in robots]
    sets = (tuple(a for a in combo if a is not None) for combo in itertools.product(*options))
    ratio, witness, inspected = _scan(obj, sets)
    return Curvature(1.0 - ratio if witness else 0.0, witness, True, inspected)


def curvature_sampled(
    obj: CoverageObjective, n_samples: int, seed: int = 0, robots: Sequence[int] | None = None
) -> Curvature:
    """Curvature estimated from ``n_samples`` random partial assignments.

    The estimate can only under-report the true curvature.  When the sample
    budget covers the whole space the enumeration is exhaustive and exact.
    """
    if n_samples < 1:
        raise InvalidParameterError("n_samples must be >= 1")
    robots = obj.robots if robots is None else tuple(robots)
    total = _partial_assignment_count(obj, robots)
    if n_samples >= total:
        result = curvature_exact(obj, robots, cap=total)
        return result
    rng = np.random.default_rng(seed)
    options = [(None, *obj.actions_of(r)) for r in robots]

    def draws():
        for _ in range(n_samples):
            picks = [opts[int(rng.integers(len(opts)))] for opts in options]
            yield tuple(a for a in picks if a is not None)

    ratio, witness, inspected = _scan(obj, draws())
    return Curvature(1.0 - ratio if witness else 0.0, witness, False, inspected)


def curvature_ratio(obj: CoverageObjective, chosen: Iterable[int], x: int) -> float:
    """(f(S) - f(S - x)) / f({x}) for a witness pair, evaluated from scratch."""
    chosen = set(chosen)
    full = obj.state_of(chosen)
    rest = obj.state_of(chosen - {x})
    return (full.bit_count() - rest.bit_count()) / obj.masks[x].bit_count()
