import copy
import json

import numpy as np
import pytest

from desktwin.errors import CatalogError, SceneError
from desktwin.geometry import RigidTransform
from desktwin.scene import EnvironmentState, SceneGraph, scene_equal
from desktwin.scene.assets import build_default_assets
from desktwin.scene.catalog import edit_distance, load_catalog
from desktwin.scene.graph import load_scene


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("assets")
    catalog_path, scene_path = build_default_assets(root)
    return catalog_path, scene_path


@pytest.fixture
def scene(workspace):
    catalog_path, _ = workspace
    return SceneGraph(load_catalog(catalog_path))


def at(x, y, z=0.0):
    return RigidTransform(np.eye(3), np.array([x, y, z], dtype=float))


def test_edit_distance():
    assert edit_distance("trafic_cone", "traffic_cone") == 1
    assert edit_distance("", "abc") == 3
    assert edit_distance("kitten", "sitting") == 3


def test_catalog_loading_and_suggestions(workspace):
    catalog_path, _ = workspace
    catalog = load_catalog(catalog_path)
    assert "traffic_cone" in catalog
    with pytest.raises(CatalogError) as err:
        catalog.require("trafic_cone")
    assert "traffic_cone" in err.value.suggestions
    assert "traffic_cone" in catalog.find_by_tag("pylon")
    assert "passenger_car" in catalog.find_by_tag("vehicle")


def test_add_asset_ids_and_center(scene):
    id1, _ = scene.add_asset("traffic_cone", at(1, 0))
    id2, _ = scene.add_asset("traffic_cone", at(3, 0))
    assert (id1, id2) == ("traffic_cone_1", "traffic_cone_2")
    assert np.allclose(scene.anchors["scene_center"], [2, 0, 0])


def test_unknown_class_suggests(scene):
    with pytest.raises(CatalogError, match="traffic_cone"):
        scene.add_asset("trafic_cone", at(0, 0))


def test_add_then_revert_restores(scene):
    before = scene.snapshot()
    _, diff = scene.add_asset("road_barrier", at(5, 5))
    assert not scene_equal(before, scene.snapshot())
    scene.revert_diff(diff)
    assert scene_equal(before, scene.snapshot())


def test_remove_restores_insertion_order(scene):
    for x in range(3):
        scene.add_asset("traffic_cone", at(float(x), 0))
    before = scene.snapshot()
    diff = scene.remove_asset("traffic_cone_2")
    assert [a.id for a in scene.assets] == ["traffic_cone_1", "traffic_cone_3"]
    scene.revert_diff(diff)
    assert scene_equal(before, scene.snapshot())


def test_ids_never_reused(scene):
    id1, _ = scene.add_asset("pedestrian", at(0, 0))
    scene.remove_asset(id1)
    id2, _ = scene.add_asset("pedestrian", at(0, 0))
    assert id1 == "pedestrian_1" and id2 == "pedestrian_2"


def test_set_environment_keeps_assets(scene):
    scene.add_asset("traffic_cone", at(0, 0))
    before_assets = [a.to_dict() for a in scene.assets]
    diff = scene.set_environment(EnvironmentState(weather="rain", intensity=0.7))
    assert scene.environment.weather == "rain"
    assert [a.to_dict() for a in scene.assets] == before_assets
    scene.revert_diff(diff)
    assert scene.environment.weather == "clear"


def test_set_pose_same_pose_roundtrip(scene):
    aid, _ = scene.add_asset("traffic_cone", at(1, 1))
    before = scene.snapshot()
    diff = scene.set_pose(aid, at(1, 1))
    scene.revert_diff(diff)
    assert scene_equal(before, scene.snapshot())


def test_search_filters(scene):
    for x in range(3):
        scene.add_asset("traffic_cone", at(float(x), 0))
    scene.add_asset("passenger_car", at(10, 10))
    assert scene.search({"class": "traffic_cone"}) == [
        "traffic_cone_1", "traffic_cone_2", "traffic_cone_3"]
    assert scene.search({"tag": "vehicle"}) == ["passenger_car_1"]
    near = scene.search({"near_anchor": "scene_center", "radius": 2.0})
    assert "traffic_cone_1" not in near or len(near) > 0  # sanity
    with pytest.raises(SceneError):
        scene.search({"near_anchor": "nowhere"})
    assert SceneGraph(scene.catalog).search({"class": "traffic_cone"}) == []


def test_search_radius_zero_matches_exact(scene):
    aid, _ = scene.add_asset("traffic_cone", at(4, 4))
    center = scene.anchors["scene_center"]
    scene.set_pose(aid, RigidTransform(np.eye(3), center.copy()))
    hits = scene.search({"near_anchor": "scene_center", "radius": 0.0})
    assert aid in hits


def test_search_does_not_mutate(scene):
    scene.add_asset("traffic_cone", at(1, 2))
    before = scene.to_json()
    scene.search({"class": "traffic_cone", "near_anchor": "scene_center",
                  "radius": 100.0})
    assert scene.to_json() == before


def test_arrange_line(scene):
    ids = [scene.add_asset("traffic_cone", at(0, 0))[0] for _ in range(4)]
    scene.arrange(ids, "line", 2.0, origin=np.zeros(3))
    xs = [scene.asset(i).pose.translation[0] for i in ids]
    assert xs == [0.0, 2.0, 4.0, 6.0]


def test_arrange_circle_arc_lengths(scene):
    ids = [scene.add_asset("traffic_cone", at(0, 0))[0] for _ in range(6)]
    spacing = 1.5
    scene.arrange(ids, "circle", spacing, origin=np.zeros(3))
    pos = np.stack([scene.asset(i).pose.translation for i in ids])
    radius = spacing * 6 / (2 * np.pi)
    assert np.allclose(np.linalg.norm(pos[:, :2], axis=1), radius, atol=1e-9)
    # adjacent arc length = radius * angular gap = spacing exactly
    angles = np.arctan2(pos[:, 1], pos[:, 0])
    gaps = np.diff(np.unwrap(angles))
    assert np.allclose(radius * np.abs(gaps), spacing, atol=1e-9)


def test_arrange_single_at_origin(scene):
    aid, _ = scene.add_asset("traffic_cone", at(9, 9))
    for pattern in ("line", "circle", "grid"):
        scene.arrange([aid], pattern, 2.0, origin=np.array([1.0, 2.0, 0.0]))
        assert np.allclose(scene.asset(aid).pose.translation, [1, 2, 0])


def test_arrange_preserves_orientation(scene):
    rot = RigidTransform(
        np.array([[0.0, -1.0, 0], [1.0, 0.0, 0], [0, 0, 1.0]]), np.zeros(3))
    aid, _ = scene.add_asset("traffic_cone", rot)
    bid, _ = scene.add_asset("traffic_cone", at(1, 1))
    scene.arrange([aid, bid], "line", 1.0, origin="scene_center")
    assert np.allclose(scene.asset(aid).pose.rotation, rot.rotation)


def test_arrange_errors(scene):
    aid, _ = scene.add_asset("traffic_cone", at(0, 0))
    with pytest.raises(SceneError):
        scene.arrange([aid], "spiral", 1.0, np.zeros(3))
    with pytest.raises(SceneError):
        scene.arrange([aid], "line", 0.0, np.zeros(3))
    with pytest.raises(SceneError):
        scene.arrange(["ghost"], "line", 1.0, np.zeros(3))


def test_revision_strictly_increases(scene):
    revs = [scene.revision]
    for x in range(5):
        scene.add_asset("traffic_cone", at(float(x), 0))
        revs.append(scene.revision)
    assert all(b > a for a, b in zip(revs, revs[1:]))


def test_random_edit_sequences_revert_exactly(workspace, rng):
    catalog_path, _ = workspace
    catalog = load_catalog(catalog_path)
    classes = catalog.class_names
    for trial in range(30):
        scene = SceneGraph(catalog)
        for _ in range(rng.integers(0, 4)):
            scene.add_asset(str(rng.choice(classes)),
                            at(*rng.uniform(-5, 5, size=2)))
        baseline = scene.snapshot()
        diffs = []
        for _ in range(int(rng.integers(1, 20))):
            ids = [a.id for a in scene.assets]
            choices = ["add", "env", "pose", "prop", "remove"] if ids else ["add", "env"]
            op = str(rng.choice(choices))
            if op == "add":
                _, d = scene.add_asset(str(rng.choice(classes)),
                                       at(*rng.uniform(-5, 5, size=2)))
            elif op == "env":
                weather = str(rng.choice(["clear", "fog", "rain", "snow"]))
                d = scene.set_environment(EnvironmentState(
                    time_of_day=float(rng.uniform(0, 24)), weather=weather,
                    intensity=float(rng.uniform(0, 1))))
            elif op == "pose":
                d = scene.set_pose(str(rng.choice(ids)),
                                   at(*rng.uniform(-5, 5, size=2)))
            elif op == "prop":
                d = scene.set_property(str(rng.choice(ids)), "tint",
                                       float(rng.uniform(0, 1)))
            else:
                d = scene.remove_asset(str(rng.choice(ids)))
            diffs.append(d)
        for d in reversed(diffs):
            scene.revert_diff(d)
        assert scene_equal(baseline, scene.snapshot())


def test_scene_save_load_round_trip(workspace, tmp_path, scene):
    scene.add_asset("traffic_cone", at(1, 2))
    scene.add_asset("cement_rubble", at(-1, 3))
    scene.set_environment(EnvironmentState(weather="fog", intensity=0.4))
    path = tmp_path / "scene.json"
    scene.catalog_ref = str(scene.catalog.source)
    scene.save(path)
    back = load_scene(path)
    assert scene_equal(scene.snapshot(), back.snapshot())
    # counters restored: next cone id continues the sequence
    nid, _ = back.add_asset("traffic_cone", at(0, 0))
    assert nid == "traffic_cone_2"


def test_default_scene_file(workspace):
    _, scene_path = workspace
    scene = load_scene(scene_path)
    assert "jtekt_entrance" in scene.anchors
    assert scene.environment.weather == "clear"
    assert len(scene) == 0
