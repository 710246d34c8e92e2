"""Map files and run-ledger JSON."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path as FsPath

import numpy as np

from ..geometry import Aabb, Ball, Box, WorldMap

MAP_FORMAT = 1


def map_to_dict(world: WorldMap) -> dict:
    obstacles = []
    for o in world.obstacles:
        if isinstance(o, Ball):
            obstacles.append({"kind": "ball", "center": o.center.tolist(), "radius": o.radius})
        else:
            obstacles.append({"kind": "box", "min": o.min_corner.tolist(), "max": o.max_corner.tolist()})
    return {
        "format": MAP_FORMAT,
        "dimension": world.n,
        "bounds": {"min": world.bounds.min_corner.tolist(), "max": world.bounds.max_corner.tolist()},
        "obstacles": obstacles,
        "start": world.start.tolist(),
        "goal": world.goal.tolist(),
        "agent_radius": world.agent_radius,
    }


def map_from_dict(data: dict) -> WorldMap:
    if data.get("format") != MAP_FORMAT:
        raise ValueError(f"unsupported map format {data.get('format')!r}")
    bounds = Aabb(data["bounds"]["min"], data["bounds"]["max"])
    if bounds.n != data["dimension"]:
        raise ValueError("bounds do not match the declared dimension")
    obstacles = []
    for o in data["obstacles"]:
        if o["kind"] == "ball":
            obstacles.append(Ball(o["center"], o["radius"]))
        elif o["kind"] == "box":
            obstacles.append(Box(o["min"], o["max"]))
        else:
            raise ValueError(f"unknown obstacle kind {o['kind']!r}")
    return WorldMap(bounds, obstacles, data["start"], data["goal"], data.get("agent_radius", 0.0))


def save_map(world: WorldMap, path) -> None:
    FsPath(path).write_text(json.dumps(map_to_dict(world), indent=1) + "\n", encoding="utf-8")


def load_map(path) -> WorldMap:
    return map_from_dict(json.loads(FsPath(path).read_text(encoding="utf-8")))


def map_hash(world: WorldMap) -> str:
    """Structural fingerprint used for the fairness check across planners."""
    blob = json.dumps(map_to_dict(world), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def write_json(obj, path) -> None:
    FsPath(path).write_text(json.dumps(obj, indent=1, default=_default) + "\n", encoding="utf-8")


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")
