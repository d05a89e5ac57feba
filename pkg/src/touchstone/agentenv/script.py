"""Scripted agents: replay a fixed list of steps through the agent API.

A script file is JSON::

    {"task": {"task_id": ..., "instruction": ..., "source_tag": ...},
     "packages": ["com.android.vending"],          (optional)
     "actions": [
        {"do": "click", "target": {"text": "Install"}},
        {"do": "click", "x": 0.5, "y": 0.12},
        {"do": "swipe", "direction": "up"},
        {"do": "type", "text": "Microsoft Excel"},
        {"do": "press_back"},
        {"do": "task_complete"}
     ]}

A click ``target`` selects the first functional component whose attributes
equal every given value (keys: text, content-desc, resource-id, class) and
taps its centre.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import ConfigError
from ..trace import TaskRecord
from ..vh import UiNode, UiTree, parse_vh

SWIPES = {
    "up": (0.5, 0.7, 0.5, 0.3),
    "down": (0.5, 0.3, 0.5, 0.7),
    "left": (0.8, 0.5, 0.2, 0.5),
    "right": (0.2, 0.5, 0.8, 0.5),
}


@dataclass(frozen=True)
class Script:
    task: TaskRecord
    actions: tuple[dict, ...]
    packages: frozenset[str] | None = None


def load_script(path) -> Script:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        packages = doc.get("packages")
        return Script(TaskRecord.from_json(doc["task"]), tuple(doc["actions"]),
                      None if packages is None else frozenset(packages))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad script {path}: {exc}") from None


def find_target(tree: UiTree, selector: dict) -> UiNode:
    for _, node in tree.components:
        if all(node.get(k) == v for k, v in selector.items()):
            return node
    raise ConfigError(f"no component matches {selector!r}")


def centre(tree: UiTree, node: UiNode) -> tuple[float, float]:
    left, top, right, bottom = node.bounds
    return (left + right) / 2 / tree.screen_w, (top + bottom) / 2 / tree.screen_h


def run_step(env, step: dict) -> None:
    do = step.get("do")
    if do == "click":
        if "target" in step:
            tree = parse_vh(env.get_view_hierarchy())
            x, y = centre(tree, find_target(tree, step["target"]))
        else:
            x, y = step["x"], step["y"]
        env.post_click(x, y)
    elif do == "swipe":
        if "direction" in step:
            coords = SWIPES[step["direction"]]
        else:
            coords = (step["touch_x"], step["touch_y"], step["lift_x"], step["lift_y"])
        env.post_swipe(*coords, step.get("duration", 300))
    elif do == "type":
        env.post_type(step["text"])
    elif do in ("press_home", "press_back", "task_complete", "task_impossible"):
        getattr(env, "post_" + do)()
    else:
        raise ConfigError(f"unknown script step {step!r}")


def run_script(env, actions) -> None:
    """Drive ``env`` (a Session or an AgentEnvClient) through ``actions``."""
    for step in actions:
        run_step(env, step)
