"""World model: robots, motion-primitive actions, targets and scenario files.

Every robot owns the same five motion primitives.  An action's coverage
region is an axis-aligned rectangle that starts at the robot's position and
extends ``l_t`` metres along the motion axis, ``l_o`` metres wide and centred
on that axis.  ``stay`` covers an ``l_o x l_o`` square centred on the robot.

Random scenarios are drawn from numpy's PCG64 bit generator seeded with the
scenario seed, consuming the stream in a fixed order: all robot x
coordinates, all robot y coordinates, all target x coordinates, all target y
coordinates, each via ``Generator.uniform(low, high, size)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidParameterError, ScenarioFormatError, SchemaVersionError

SCHEMA_VERSION = 1

ACTION_KINDS = ("forward", "backward", "left", "right", "stay")
N_KINDS = len(ACTION_KINDS)

# unit motion axis per kind; stay has none
_DIRECTIONS = {
    "forward": (1.0, 0.0),
    "backward": (-1.0, 0.0),
    "left": (0.0, 1.0),
    "right": (0.0, -1.0),
    "stay": (0.0, 0.0),
}


@dataclass(frozen=True)
class Rect:
    """Closed axis-aligned rectangle ``[xmin, xmax] x [ymin, ymax]``."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of the rows of an (m, 2) array lying inside (boundary included)."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        return (
            (pts[:, 0] >= self.xmin)
            & (pts[:, 0] <= self.xmax)
            & (pts[:, 1] >= self.ymin)
            & (pts[:, 1] <= self.ymax)
        )

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin


@dataclass(frozen=True)
class Geometry:
    l_t: float = 10.0
    l_o: float = 3.0
    l_f: float | None = None

    def __post_init__(self):
        if self.l_f is None:
            object.__setattr__(self, "l_f", self.l_t - self.l_o)
        for name in ("l_t", "l_o"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameterError(f"geometry {name} must be positive, got {value}")
        if not (math.isfinite(self.l_f) and self.l_f >= 0):
            raise InvalidParameterError(f"geometry l_f must be non-negative, got {self.l_f}")
        if abs(self.l_t - (self.l_f + self.l_o)) > 1e-9:
            raise InvalidParameterError(
                f"geometry requires l_t == l_f + l_o, got {self.l_t} vs {self.l_f} + {self.l_o}"
            )


@dataclass(frozen=True)
class Robot:
    id: int
    position: tuple[float, float]

    @property
    def action_ids(self) -> tuple[int, ...]:
        return tuple(self.id * N_KINDS + k for k in range(N_KINDS))


@dataclass(frozen=True)
class Action:
    id: int
    owner: int
    kind: str
    region: Rect


@dataclass(frozen=True)
class Target:
    id: int
    position: tuple[float, float]
    velocity: tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class Scenario:
    robots: tuple[Robot, ...]
    targets: tuple[Target, ...]
    comm_range: float
    attack_budget: int
    geometry: Geometry = field(default_factory=Geometry)
    seed: int = 0

    @cached_property
    def actions(self) -> dict[int, Action]:
        table = {}
        for robot in self.robots:
            for kind, action_id in zip(ACTION_KINDS, robot.action_ids):
                table[action_id] = Action(action_id, robot.id, kind, action_region(robot, kind, self.geometry))
        return table

    @property
    def n_robots(self) -> int:
        return len(self.robots)

    def robot_positions(self) -> np.ndarray:
        return np.array([r.position for r in self.robots], dtype=float).reshape(-1, 2)

    def target_positions(self) -> np.ndarray:
        return np.array([t.position for t in self.targets], dtype=float).reshape(-1, 2)

    def with_robot_positions(self, positions: Sequence[Sequence[float]]) -> "Scenario":
        robots = tuple(Robot(r.id, (float(p[0]), float(p[1]))) for r, p in zip(self.robots, positions))
        return replace(self, robots=robots)

    def with_comm_range(self, comm_range: float) -> "Scenario":
        return replace(self, comm_range=float(comm_range))

    def with_attack_budget(self, attack_budget: int) -> "Scenario":
        return replace(self, attack_budget=int(attack_budget))


def action_region(robot: Robot, kind: str, geometry: Geometry) -> Rect:
    """Coverage rectangle of ``robot`` executing the primitive ``kind``."""
    if kind not in _DIRECTIONS:
        raise InvalidParameterError(f"unknown action kind {kind!r}")
    px, py = robot.position
    half = geometry.l_o / 2.0
    if kind == "stay":
        return Rect(px - half, py - half, px + half, py + half)
    dx, dy = _DIRECTIONS[kind]
    ex, ey = px + dx * geometry.l_t, py + dy * geometry.l_t
    if dx != 0.0:
        return Rect(min(px, ex), py - half, max(px, ex), py + half)
    return Rect(px - half, min(py, ey), px + half, max(py, ey))


def displacement(kind: str, geometry: Geometry) -> tuple[float, float]:
    """Distance travelled during one step of ``kind`` (``l_f`` along the axis, zero for stay)."""
    dx, dy = _DIRECTIONS[kind]
    return dx * geometry.l_f, dy * geometry.l_f


def validate(scenario: Scenario) -> None:
    """Raise :class:`InvalidParameterError` if any scenario invariant is violated."""
    ids = [r.id for r in scenario.robots]
    if ids != list(range(len(ids))):
        raise InvalidParameterError("robot ids must be 0..n-1 in order")
    tids = [t.id for t in scenario.targets]
    if len(set(tids)) != len(tids):
        raise InvalidParameterError("target ids must be unique")
    if not (math.isfinite(scenario.comm_range) and scenario.comm_range > 0):
        raise InvalidParameterError(f"comm_range must be positive, got {scenario.comm_range}")
    if not 0 <= scenario.attack_budget <= len(scenario.robots):
        raise InvalidParameterError(
            f"attack_budget must lie in [0, {len(scenario.robots)}], got {scenario.attack_budget}"
        )
    for robot in scenario.robots:
        if not all(math.isfinite(c) for c in robot.position):
            raise InvalidParameterError(f"robot {robot.id} has a non-finite position")
    for target in scenario.targets:
        if not all(math.isfinite(c) for c in (*target.position, *target.velocity)):
            raise InvalidParameterError(f"target {target.id} has a non-finite state")
    owners = {}
    for action in scenario.actions.values():
        owners.setdefault(action.owner, []).append(action.id)
    for robot in scenario.robots:
        if sorted(owners.get(robot.id, [])) != list(robot.action_ids):
            raise InvalidParameterError(f"robot {robot.id} action table is inconsistent")


def generate_scenario(
    seed: int,
    n_robots: int,
    n_targets: int,
    area: Rect | Sequence[float] = Rect(0.0, 0.0, 200.0, 200.0),
    comm_range: float = 60.0,
    attack_budget: int = 0,
    geometry: Geometry | None = None,
) -> Scenario:
    """Sample robot and target positions uniformly over ``area``.

    ``area`` is a :class:`Rect` or a ``(xmin, ymin, xmax, ymax)`` sequence.
    Targets are static (zero velocity).
    """
    if not isinstance(area, Rect):
        area = Rect(*map(float, area))
    geometry = geometry or Geometry()
    if n_robots < 1:
        raise InvalidParameterError(f"n_robots must be >= 1, got {n_robots}")
    if n_targets < 0:
        raise InvalidParameterError(f"n_targets must be >= 0, got {n_targets}")
    if not (area.width > 0 and area.height > 0):
        raise InvalidParameterError("area must have positive width and height")
    if not comm_range > 0:
        raise InvalidParameterError(f"comm_range must be positive, got {comm_range}")
    if not 0 <= attack_budget <= n_robots:
        raise InvalidParameterError(f"attack_budget must lie in [0, {n_robots}], got {attack_budget}")

    rng = np.random.Generator(np.random.PCG64(seed))
    rx = rng.uniform(area.xmin, area.xmax, n_robots)
    ry = rng.uniform(area.ymin, area.ymax, n_robots)
    tx = rng.uniform(area.xmin, area.xmax, n_targets)
    ty = rng.uniform(area.ymin, area.ymax, n_targets)

    robots = tuple(Robot(i, (float(rx[i]), float(ry[i]))) for i in range(n_robots))
    targets = tuple(Target(j, (float(tx[j]), float(ty[j]))) for j in range(n_targets))
    scenario = Scenario(robots, targets, float(comm_range), int(attack_budget), geometry, int(seed))
    validate(scenario)
    return scenario


# --- file I/O -------------------------------------------------------------


def scenario_to_dict(scenario: Scenario) -> dict:
    g = scenario.geometry
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": scenario.seed,
        "comm_range": scenario.comm_range,
        "attack_budget": scenario.attack_budget,
        "geometry": {"l_t": g.l_t, "l_o": g.l_o, "l_f": g.l_f},
        "robots": [{"id": r.id, "position": list(r.position)} for r in scenario.robots],
        "targets": [
            {"id": t.id, "position": list(t.position), "velocity": list(t.velocity)}
            for t in scenario.targets
        ],
    }


def _number(value, field_name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioFormatError(field_name, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ScenarioFormatError(field_name, "must be finite")
    return float(value)


def _integer(value, field_name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioFormatError(field_name, f"expected an integer, got {value!r}")
    return value


def _point(value, field_name: str) -> tuple[float, float]:
    if not isinstance(value, list) or len(value) != 2:
        raise ScenarioFormatError(field_name, f"expected a 2-element list, got {value!r}")
    return (_number(value[0], field_name), _number(value[1], field_name))


def _require(data: dict, key: str, prefix: str = ""):
    if key not in data:
        raise ScenarioFormatError(prefix + key, "missing")
    return data[key]


def scenario_from_dict(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioFormatError("<root>", "expected an object")
    version = _require(data, "schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError("schema_version", f"unsupported version {version!r}, expected {SCHEMA_VERSION}")

    seed = _integer(_require(data, "seed"), "seed")
    comm_range = _number(_require(data, "comm_range"), "comm_range")
    if comm_range <= 0:
        raise ScenarioFormatError("comm_range", "must be positive")
    attack_budget = _integer(_require(data, "attack_budget"), "attack_budget")
    if attack_budget < 0:
        raise ScenarioFormatError("attack_budget", f"must be >= 0, got {attack_budget}")

    geo = _require(data, "geometry")
    if not isinstance(geo, dict):
        raise ScenarioFormatError("geometry", "expected an object")
    try:
        geometry = Geometry(
            _number(_require(geo, "l_t", "geometry."), "geometry.l_t"),
            _number(_require(geo, "l_o", "geometry."), "geometry.l_o"),
            _number(_require(geo, "l_f", "geometry."), "geometry.l_f"),
        )
    except InvalidParameterError as exc:
        raise ScenarioFormatError("geometry", str(exc)) from exc

    raw_robots = _require(data, "robots")
    if not isinstance(raw_robots, list) or not raw_robots:
        raise ScenarioFormatError("robots", "expected a non-empty list")
    robots = []
    for k, item in enumerate(raw_robots):
        where = f"robots[{k}]"
        if not isinstance(item, dict):
            raise ScenarioFormatError(where, "expected an object")
        rid = _integer(_require(item, "id", where + "."), where + ".id")
        if rid != k:
            raise ScenarioFormatError(where + ".id", f"expected {k}, got {rid}")
        robots.append(Robot(rid, _point(_require(item, "position", where + "."), where + ".position")))

    raw_targets = _require(data, "targets")
    if not isinstance(raw_targets, list):
        raise ScenarioFormatError("targets", "expected a list")
    targets, seen = [], set()
    for k, item in enumerate(raw_targets):
        where = f"targets[{k}]"
        if not isinstance(item, dict):
            raise ScenarioFormatError(where, "expected an object")
        tid = _integer(_require(item, "id", where + "."), where + ".id")
        if tid in seen:
            raise ScenarioFormatError(where + ".id", f"duplicate id {tid}")
        seen.add(tid)
        position = _point(_require(item, "position", where + "."), where + ".position")
        velocity = _point(item.get("velocity", [0.0, 0.0]), where + ".velocity")
        targets.append(Target(tid, position, velocity))

    if attack_budget > len(robots):
        raise ScenarioFormatError("attack_budget", f"exceeds robot count {len(robots)}")
    return Scenario(tuple(robots), tuple(targets), comm_range, attack_budget, geometry, seed)


def dumps_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=2) + "\n"


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(dumps_scenario(scenario))


def load_scenario(path: str | Path) -> Scenario:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError("<root>", f"invalid JSON: {exc}") from exc
    return scenario_from_dict(data)


def make_scenario(
    robot_positions: Iterable[Sequence[float]],
    target_positions: Iterable[Sequence[float]] = (),
    comm_range: float = 1.0,
    attack_budget: int = 0,
    geometry: Geometry | None = None,
    seed: int = 0,
) -> Scenario:
    """Build a scenario from explicit coordinates (fixtures, tests, tooling)."""
    robots = tuple(Robot(i, (float(p[0]), float(p[1]))) for i, p in enumerate(robot_positions))
    targets = tuple(Target(j, (float(p[0]), float(p[1]))) for j, p in enumerate(target_positions))
    scenario = Scenario(robots, targets, float(comm_range), int(attack_budget), geometry or Geometry(), seed)
    validate(scenario)
    return scenario
