"""Canned completions for the deterministic mock backend.

Level-1 rules match the user's raw prompt and reply with a requirements
block whose detail strings act as routing keys; level-2 rules match those
keys inside the serialized requirement and reply with task lists. The table
covers the appearance/maintenance/complex demo prompts and the benchmark
suite's 7 task kinds x 4 prompt gradations.
"""
from __future__ import annotations

from .backend import MockBackend, MockRule, fenced


def _req(intent: str, detail: str) -> str:
    return fenced({"requirements": [{"intent": intent, "detail": detail}]})


def _tasks(*tasks: dict) -> str:
    return fenced({"tasks": list(tasks)})


def _level1(contains: str, intent: str, detail: str) -> MockRule:
    return MockRule(stage="level1", contains=contains,
                    response=_req(intent, detail))


def _level2(detail_key: str, *tasks: dict) -> MockRule:
    return MockRule(stage="level2", contains=detail_key,
                    response=_tasks(*tasks))


DEMO_LEVEL1 = [
    _level1("It's daytime", "appearance_env", "set daytime"),
    _level1("night time", "appearance_env", "set nighttime"),
    _level1("foggy", "appearance_env", "set fog"),
    _level1("Make it rain", "appearance_env", "set rain"),
    _level1("Let it snow", "appearance_env", "set snow"),
    _level1("clear day", "appearance_env", "set clear day"),
    _level1("cement rubble at the center", "add", "rubble at center"),
    _level1("traffic cones to mark the maintenance", "add",
            "cones around maintenance"),
    _level1("road barriers around there", "add", "barriers around maintenance"),
    _level1("parked car at the JTEKT", "add", "parked car at jtekt"),
    _level1("skidpad maneuver", "add", "skidpad robot"),
    _level1("jaywalking pedestrian", "add", "jaywalking pedestrian"),
]

DEMO_LEVEL2 = [
    _level2("set daytime", {"type": "appearance", "time_of_day": 12.0}),
    _level2("set nighttime", {"type": "appearance", "time_of_day": 22.0}),
    _level2("set fog",
            {"type": "appearance", "weather": "fog", "intensity": 0.5}),
    _level2("set rain", {"type": "appearance", "weather": "rain"}),
    _level2("set snow", {"type": "appearance", "weather": "snow"}),
    _level2("set clear day",
            {"type": "appearance", "weather": "clear", "time_of_day": 12.0}),
    _level2("rubble at center",
            {"type": "add", "class_name": "cement_rubble", "count": 1,
             "placement": {"anchor": "scene_center"}}),
    _level2("cones around maintenance",
            {"type": "add", "class_name": "traffic_cone", "count": 4,
             "placement": {"anchor": "scene_center", "offset": [2.0, 0.0, 0.0]},
             "spacing": 1.0},
            {"type": "arrange",
             "selector": {"class": "traffic_cone", "near_anchor": "scene_center",
                          "radius": 12.0},
             "pattern": "circle", "spacing": 2.0,
             "origin": {"anchor": "scene_center"}}),
    _level2("barriers around maintenance",
            {"type": "add", "class_name": "road_barrier", "count": 3,
             "placement": {"anchor": "scene_center", "offset": [3.0, 0.0, 0.0]},
             "spacing": 1.0},
            {"type": "arrange", "selector": {"class": "road_barrier"},
             "pattern": "circle", "spacing": 4.0,
             "origin": {"anchor": "scene_center"}}),
    _level2("parked car at jtekt",
            {"type": "add", "class_name": "passenger_car", "count": 1,
             "placement": {"anchor": "jtekt_entrance"},
             "properties": {"state": "parked"}}),
    _level2("skidpad robot",
            {"type": "add", "class_name": "ackermann_robot", "count": 1,
             "placement": {"anchor": "scene_center", "offset": [0.0, -3.0, 0.0]},
             "properties": {"behavior": "skidpad"}}),
    _level2("jaywalking pedestrian",
            {"type": "add", "class_name": "pedestrian", "count": 1,
             "placement": {"point": [0.0, -4.0, 0.0]},
             "properties": {"behavior": "jaywalking"}},
            {"type": "add", "class_name": "pedestrian_sign", "count": 1,
             "placement": {"point": [2.0, -4.0, 0.0]}}),
]

# benchmark prompts: all four gradations of a kind route to one detail key
BENCH_LEVEL1 = [
    # search
    _level1("Find all traffic_cone assets", "search", "bench search cones"),
    _level1("Which pylons are present", "search", "bench search cones"),
    _level1("What markers do we have", "search", "bench search cones"),
    _level1("Finde all trafic cones", "search", "bench search cones"),
    # add
    _level1("Add 2 traffic_cone assets at the scene center", "add",
            "bench add cones"),
    _level1("Place a couple of cones in the middle", "add", "bench add cones"),
    _level1("We need some cones", "add", "bench add cones"),
    _level1("add too cones midle", "add", "bench add cones"),
    # remove
    _level1("Remove the asset passenger_car_1", "remove", "bench remove car"),
    _level1("Get rid of the car", "remove", "bench remove car"),
    _level1("Too many vehicles, clean up", "remove", "bench remove car"),
    _level1("remove the carr", "remove", "bench remove car"),
    # position
    _level1("Position the passenger_car at anchor jtekt_entrance", "position",
            "bench position car"),
    _level1("Park the car at the JTEKT entrance", "position",
            "bench position car"),
    _level1("Put the car by the entrance", "position", "bench position car"),
    _level1("car to jtekt entrnce", "position", "bench position car"),
    # move
    _level1("Move the road_barrier by [2, 0, 0]", "move", "bench move barrier"),
    _level1("Shift the barrier a couple meters", "move", "bench move barrier"),
    _level1("Scoot the barrier over", "move", "bench move barrier"),
    _level1("move barier 2m", "move", "bench move barrier"),
    # arrange
    _level1("Arrange the traffic cones in a line with 2 m spacing", "arrange",
            "bench arrange cones"),
    _level1("Line up the cones two meters apart", "arrange",
            "bench arrange cones"),
    _level1("Make the cones tidy", "arrange", "bench arrange cones"),
    _level1("cones in lin 2m", "arrange", "bench arrange cones"),
    # appearance
    _level1("Set the weather to rain with intensity 0.7", "appearance_env",
            "bench rain"),
    _level1("Make it drizzle outside", "appearance_env", "bench rain"),
    _level1("Weather could be wetter", "appearance_env", "bench rain"),
    _level1("mak it ran", "appearance_env", "bench rain"),
]

BENCH_LEVEL2 = [
    _level2("bench search cones",
            {"type": "search", "query": {"class": "traffic_cone"}}),
    _level2("bench add cones",
            {"type": "add", "class_name": "traffic_cone", "count": 2,
             "placement": {"anchor": "scene_center"}, "spacing": 1.5}),
    _level2("bench remove car",
            {"type": "remove", "selector": {"class": "passenger_car"}}),
    _level2("bench position car",
            {"type": "position", "selector": {"class": "passenger_car"},
             "target": {"anchor": "jtekt_entrance"}}),
    _level2("bench move barrier",
            {"type": "move", "selector": {"class": "road_barrier"},
             "delta": [2.0, 0.0, 0.0]}),
    _level2("bench arrange cones",
            {"type": "arrange", "selector": {"class": "traffic_cone"},
             "pattern": "line", "spacing": 2.0,
             "origin": {"anchor": "scene_center"}}),
    _level2("bench rain",
            {"type": "appearance", "weather": "rain", "intensity": 0.7}),
]


def make_default_mock(delay_s: float = 0.0) -> MockBackend:
    return MockBackend(DEMO_LEVEL1 + BENCH_LEVEL1 + DEMO_LEVEL2 + BENCH_LEVEL2,
                       delay_s=delay_s)
