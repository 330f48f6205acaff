import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import X1_FORWARD, X2_LEFT
from oracles import region
from swarmguard.errors import InvalidParameterError, ScenarioFormatError, SchemaVersionError
from swarmguard.objective import CoverageObjective
from swarmguard.scenario import (
    ACTION_KINDS,
    Geometry,
    Rect,
    Robot,
    action_region,
    displacement,
    dumps_scenario,
    generate_scenario,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)


def test_generate_counts():
    s = generate_scenario(7, 10, 100, Rect(0, 0, 200, 200), 60.0, 5, Geometry(10, 3))
    assert s.n_robots == 10
    assert len(s.actions) == 50
    assert len(s.targets) == 100
    assert s.attack_budget == 5


def test_generate_deterministic():
    a = generate_scenario(7, 10, 100, comm_range=60.0, attack_budget=5)
    b = generate_scenario(7, 10, 100, comm_range=60.0, attack_budget=5)
    assert a == b
    assert dumps_scenario(a) == dumps_scenario(b)


def test_generate_replays_documented_stream():
    s = generate_scenario(3, 4, 6, Rect(0, 0, 20, 20), 5.0, 1)
    rng = np.random.Generator(np.random.PCG64(3))
    rx, ry = rng.uniform(0, 20, 4), rng.uniform(0, 20, 4)
    tx, ty = rng.uniform(0, 20, 6), rng.uniform(0, 20, 6)
    assert np.array_equal(s.robot_positions(), np.column_stack([rx, ry]))
    assert np.array_equal(s.target_positions(), np.column_stack([tx, ty]))
    assert np.all((s.robot_positions() >= 0) & (s.robot_positions() <= 20))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n_robots=0, n_targets=5),
        dict(n_robots=3, n_targets=5, comm_range=0.0),
        dict(n_robots=3, n_targets=5, attack_budget=4),
        dict(n_robots=3, n_targets=5, area=(0, 0, 0, 10)),
    ],
)
def test_generate_rejects_bad_parameters(kwargs):
    with pytest.raises(InvalidParameterError):
        generate_scenario(0, **kwargs)


def test_geometry_requires_consistent_lengths():
    assert Geometry(10, 3).l_f == 7
    with pytest.raises(InvalidParameterError):
        Geometry(10, 3, 5)
    with pytest.raises(InvalidParameterError):
        Geometry(-1, 3)


def test_round_trip(tmp_path):
    s = generate_scenario(7, 10, 100, comm_range=60.0, attack_budget=5)
    path = tmp_path / "s.json"
    save_scenario(s, path)
    assert load_scenario(path) == s


def test_negative_alpha_names_field():
    data = scenario_to_dict(generate_scenario(1, 3, 2))
    data["attack_budget"] = -1
    with pytest.raises(ScenarioFormatError) as exc:
        scenario_from_dict(data)
    assert exc.value.field == "attack_budget"


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda d: d.pop("comm_range"), "comm_range"),
        (lambda d: d["robots"][1].update(position=[1.0]), "robots[1].position"),
        (lambda d: d["targets"][0].update(position=["a", 2]), "targets[0].position"),
        (lambda d: d["geometry"].update(l_f=1.0), "geometry"),
    ],
)
def test_parse_errors_name_field(mutate, field):
    data = scenario_to_dict(generate_scenario(1, 3, 2))
    mutate(data)
    with pytest.raises(ScenarioFormatError) as exc:
        scenario_from_dict(data)
    assert exc.value.field == field


def test_schema_version_mismatch(tmp_path):
    data = scenario_to_dict(generate_scenario(1, 3, 2))
    data["schema_version"] = 99
    path = tmp_path / "s.json"
    path.write_text(json.dumps(data))
    with pytest.raises(SchemaVersionError):
        load_scenario(path)


def test_two_robot_fixture_covers_four(two_robot_scenario):
    obj = CoverageObjective.from_scenario(two_robot_scenario)
    assert obj.evaluate([X1_FORWARD, X2_LEFT]) == 4
    assert obj.covered_targets(X1_FORWARD) == {1, 2}
    assert obj.covered_targets(X2_LEFT) == {0, 1, 2, 3}


def test_forward_region():
    r = action_region(Robot(0, (0.0, 0.0)), "forward", Geometry(10, 3))
    assert (r.xmin, r.xmax, r.ymin, r.ymax) == (0, 10, -1.5, 1.5)
    pts = np.array([[0, 0], [10, 1.5], [10.01, 0], [5, -1.51]])
    assert r.contains(pts).tolist() == [True, True, False, False]


def test_stay_region():
    r = action_region(Robot(0, (0.0, 0.0)), "stay", Geometry(10, 3))
    assert (r.xmin, r.xmax, r.ymin, r.ymax) == (-1.5, 1.5, -1.5, 1.5)


@given(
    x=st.floats(-100, 100),
    y=st.floats(-100, 100),
    l_o=st.floats(0.1, 5),
    l_f=st.floats(0, 20),
    kind=st.sampled_from(ACTION_KINDS),
)
@settings(max_examples=200, deadline=None)
def test_regions_match_oracle_and_mirror(x, y, l_o, l_f, kind):
    g = Geometry(l_f + l_o, l_o, l_f)
    robot = Robot(0, (x, y))
    r = action_region(robot, kind, g)
    assert (r.xmin, r.ymin, r.xmax, r.ymax) == pytest.approx(region(x, y, kind, g.l_t, l_o))
    fwd, back = action_region(robot, "forward", g), action_region(robot, "backward", g)
    # reflecting through the robot's vertical axis swaps forward and backward
    assert (back.xmin, back.xmax) == pytest.approx((2 * x - fwd.xmax, 2 * x - fwd.xmin))
    assert (back.ymin, back.ymax) == (fwd.ymin, fwd.ymax)


def test_displacement_is_lf_along_axis():
    g = Geometry(10, 3)
    assert displacement("forward", g) == (7, 0)
    assert displacement("right", g) == (0, -7)
    assert displacement("stay", g) == (0, 0)
