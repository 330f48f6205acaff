"""Multi-round tracking episodes with Kalman-filtered target estimates.

Each round the robots filter a noisy position fix for every target, plan on
the estimated means, suffer an attack on the joint assignment, are scored
against the true target positions, move ``l_f`` along their chosen
primitive and the targets advance one step of their noisy constant-velocity
motion.  Attacked robots only lose sensing for that round; they stay in the
communication graph.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .attacks import apply_attacker
from .distributed import plan
from .errors import InvalidParameterError, InvalidStateError, SwarmGuardError
from .objective import CoverageObjective
from .scenario import ACTION_KINDS, N_KINDS, Scenario, displacement, scenario_from_dict, scenario_to_dict

LOG_SCHEMA_VERSION = 1
PSD_TOL = 1e-9


def _checked_psd(matrix, name: str) -> np.ndarray:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidStateError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidStateError(f"{name} has non-finite entries")
    scale = max(1.0, float(np.abs(m).max()))
    if np.abs(m - m.T).max() > PSD_TOL * scale:
        raise InvalidStateError(f"{name} is not symmetric")
    m = 0.5 * (m + m.T)
    if np.linalg.eigvalsh(m).min() < -PSD_TOL * scale:
        raise InvalidStateError(f"{name} is not positive semidefinite")
    return m


@dataclass(frozen=True)
class TargetMotionModel:
    transition: np.ndarray
    process_noise_cov: np.ndarray
    measurement_noise_cov: np.ndarray

    def __post_init__(self):
        F = np.asarray(self.transition, dtype=float)
        if F.shape != (4, 4) or not np.all(np.isfinite(F)):
            raise InvalidStateError("transition must be a finite 4x4 matrix")
        object.__setattr__(self, "transition", F)
        Q = _checked_psd(self.process_noise_cov, "process_noise_cov")
        R = _checked_psd(self.measurement_noise_cov, "measurement_noise_cov")
        if Q.shape != (4, 4) or R.shape != (2, 2):
            raise InvalidStateError("process noise must be 4x4 and measurement noise 2x2")
        object.__setattr__(self, "process_noise_cov", Q)
        object.__setattr__(self, "measurement_noise_cov", R)

    @classmethod
    def constant_velocity(cls, dt: float = 1.0, accel_std: float = 0.1, meas_std: float = 0.3) -> "TargetMotionModel":
        """Nearly-constant-velocity model driven by white acceleration noise."""
        I, Z = np.eye(2), np.zeros((2, 2))
        F = np.block([[I, dt * I], [Z, I]])
        q = accel_std**2
        Q = q * np.block([[dt**4 / 4 * I, dt**3 / 2 * I], [dt**3 / 2 * I, dt**2 * I]])
        return cls(F, Q, meas_std**2 * I)

    @property
    def observation(self) -> np.ndarray:
        return np.hstack([np.eye(2), np.zeros((2, 2))])


@dataclass(frozen=True)
class KalmanState:
    mean: np.ndarray
    covariance: np.ndarray


def kf_predict(state: KalmanState, model: TargetMotionModel) -> KalmanState:
    P = _checked_psd(state.covariance, "covariance")
    F = model.transition
    P = F @ P @ F.T + model.process_noise_cov
    return KalmanState(F @ np.asarray(state.mean, float), _checked_psd(0.5 * (P + P.T), "covariance"))


def kf_update(state: KalmanState, model: TargetMotionModel, measurement) -> KalmanState:
    """Position-fix update in Joseph form (keeps the covariance PSD)."""
    P = _checked_psd(state.covariance, "covariance")
    x = np.asarray(state.mean, float)
    H, R = model.observation, model.measurement_noise_cov
    S = H @ P @ H.T + R
    PHt = P @ H.T
    try:
        K = np.linalg.solve(S, PHt.T).T
    except np.linalg.LinAlgError:
        K = PHt @ np.linalg.pinv(S)
    innovation = np.asarray(measurement, float) - H @ x
    A = np.eye(4) - K @ H
    P = A @ P @ A.T + K @ R @ K.T
    return KalmanState(x + K @ innovation, _checked_psd(0.5 * (P + P.T), "covariance"))


def _noise_factor(cov: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(cov)
    return V * np.sqrt(np.clip(w, 0.0, None))


def step_targets(states: np.ndarray, model: TargetMotionModel, rng: np.random.Generator) -> np.ndarray:
    """Advance an (m, 4) array of ``[x, y, vx, vy]`` rows by one noisy transition."""
    states = np.asarray(states, float).reshape(-1, 4)
    noise = rng.standard_normal(states.shape) @ _noise_factor(model.process_noise_cov).T
    return states @ model.transition.T + noise


@dataclass
class EpisodeConfig:
    dt: float = 1.0
    accel_std: float = 0.1
    meas_std: float = 0.3
    init_vel_std: float = 0.5

    def model(self) -> TargetMotionModel:
        return TargetMotionModel.constant_velocity(self.dt, self.accel_std, self.meas_std)

    @classmethod
    def from_file(cls, path: str | Path) -> "EpisodeConfig":
        data = json.loads(Path(path).read_text())
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidParameterError(f"unknown episode config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class RoundRecord:
    round: int
    robot_positions: list[list[float]]
    assignment: dict[int, int]
    kinds: dict[int, str]
    attacked: list[int]
    covered_pre: int
    covered: int
    target_positions: list[list[float]]
    estimates: list[list[float]]
    n_cliques: int
    cov_min_eig: float
    cov_max_asym: float


class EpisodeError(SwarmGuardError):
    def __init__(self, round_index: int, cause: Exception):
        super().__init__(f"round {round_index}: {cause}")
        self.round_index = round_index
        self.cause = cause


@dataclass
class EpisodeLog:
    config: dict
    records: list[RoundRecord] = field(default_factory=list)

    def covered(self) -> list[int]:
        return [r.covered for r in self.records]

    def to_dict(self) -> dict:
        return {"schema_version": LOG_SCHEMA_VERSION, "config": self.config, "rounds": [asdict(r) for r in self.records]}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps() + "\n")

    @classmethod
    def from_dict(cls, data: dict) -> "EpisodeLog":
        if data.get("schema_version") != LOG_SCHEMA_VERSION:
            raise InvalidParameterError(f"unsupported episode log version {data.get('schema_version')!r}")
        records = []
        for raw in data["rounds"]:
            raw = dict(raw)
            raw["assignment"] = {int(k): v for k, v in raw["assignment"].items()}
            raw["kinds"] = {int(k): v for k, v in raw["kinds"].items()}
            records.append(RoundRecord(**raw))
        return cls(data["config"], records)

    def scenario(self) -> Scenario:
        return scenario_from_dict(self.config["scenario"])


def run_episode(
    scenario: Scenario,
    planner: str,
    attacker: str,
    rounds: int,
    config: EpisodeConfig | None = None,
    seed: int = 0,
    jobs: int = 1,
) -> EpisodeLog:
    """Play ``rounds`` plan/attack/score/move cycles and log every round."""
    if rounds < 1:
        raise InvalidParameterError("rounds must be >= 1")
    config = config or EpisodeConfig()
    model = config.model()
    rng = np.random.default_rng(seed)
    alpha = scenario.attack_budget

    targets = scenario.targets
    truth = np.array([[*t.position, *t.velocity] for t in targets], dtype=float).reshape(-1, 4)
    r2 = config.meas_std**2
    v2 = config.init_vel_std**2
    states = [
        KalmanState(truth[j].copy(), np.diag([r2, r2, v2, v2])) for j in range(len(targets))
    ]
    positions = scenario.robot_positions().copy()
    log = EpisodeLog(
        {
            "planner": planner,
            "attacker": attacker,
            "rounds": rounds,
            "seed": seed,
            "motion": asdict(config),
            "scenario": scenario_to_dict(scenario),
        }
    )
    R = model.measurement_noise_cov
    meas_factor = _noise_factor(R)

    for t in range(rounds):
        try:
            z = truth[:, :2] + rng.standard_normal((len(targets), 2)) @ meas_factor.T
            states = [kf_update(s, model, z[j]) for j, s in enumerate(states)]
            estimates = np.array([s.mean[:2] for s in states]).reshape(-1, 2)

            current = scenario.with_robot_positions(positions)
            planning_obj = CoverageObjective.from_scenario(current, estimates)
            result = plan(planner, current, planning_obj, alpha=alpha, jobs=jobs)
            actions = result.assignment.actions()

            true_obj = CoverageObjective.from_scenario(current, truth[:, :2])
            attack = apply_attacker(attacker, true_obj, actions, alpha)
            covered_pre = int(true_obj.value_unchecked(actions))
        except SwarmGuardError as exc:
            raise EpisodeError(t, exc) from exc

        covs = [s.covariance for s in states]
        min_eig = min((float(np.linalg.eigvalsh(c).min()) for c in covs), default=0.0)
        max_asym = max((float(np.abs(c - c.T).max()) for c in covs), default=0.0)
        chosen = dict(result.assignment.chosen)
        kinds = {r: ACTION_KINDS[a % N_KINDS] for r, a in chosen.items()}
        log.records.append(
            RoundRecord(
                round=t,
                robot_positions=positions.tolist(),
                assignment=chosen,
                kinds=kinds,
                attacked=list(attack.removed),
                covered_pre=covered_pre,
                covered=int(attack.residual_value),
                target_positions=truth[:, :2].tolist(),
                estimates=estimates.tolist(),
                n_cliques=result.partition.k,
                cov_min_eig=min_eig,
                cov_max_asym=max_asym,
            )
        )

        for r, kind in kinds.items():
            dx, dy = displacement(kind, scenario.geometry)
            positions[r] += (dx, dy)
        truth = step_targets(truth, model, rng)
        states = [kf_predict(s, model) for s in states]
    return log


def replay_coverage(log: EpisodeLog) -> list[int]:
    """Recompute each round's post-attack coverage from the logged geometry."""
    scenario = log.scenario()
    out = []
    for rec in log.records:
        current = scenario.with_robot_positions(rec.robot_positions)
        obj = CoverageObjective.from_scenario(current, np.array(rec.target_positions, float))
        kept = [a for a in rec.assignment.values() if a not in set(rec.attacked)]
        out.append(int(obj.value_unchecked(kept)))
    return out
