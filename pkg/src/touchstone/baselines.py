"""Action-sequence baselines: step-wise match and subsequence (LCS) match."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigError
from .trace import Action, ActionKind, Trace


@dataclass(frozen=True)
class ActionMatchConfig:
    click_tolerance: float = 0.14
    text_exact: bool = True

    def __post_init__(self):
        if not 0.0 <= self.click_tolerance <= math.sqrt(2):
            raise ConfigError(f"click_tolerance={self.click_tolerance} outside [0, sqrt(2)]")

    def to_json(self) -> dict:
        return {"click_tolerance": self.click_tolerance, "text_exact": self.text_exact}


def _sign(v: float) -> int:
    return (v > 0) - (v < 0)


def swipe_direction(a: Action) -> tuple[int, int]:
    return _sign(a.lift_x - a.touch_x), _sign(a.lift_y - a.touch_y)


def _loose(text: str) -> str:
    return " ".join(text.split()).casefold()


def action_equal(a: Action, b: Action, cfg: ActionMatchConfig | None = None) -> bool:
    cfg = cfg or ActionMatchConfig()
    if a.kind is not b.kind:
        return False
    if a.kind is ActionKind.CLICK:
        return math.hypot(a.x - b.x, a.y - b.y) <= cfg.click_tolerance
    if a.kind is ActionKind.SWIPE:
        return swipe_direction(a) == swipe_direction(b)
    if a.kind is ActionKind.TYPE:
        return a.text == b.text if cfg.text_exact else _loose(a.text) == _loose(b.text)
    return True


def stepwise_match(gt: Sequence[Action], executed: Sequence[Action], cfg: ActionMatchConfig | None = None) -> bool:
    return len(gt) == len(executed) and all(action_equal(g, e, cfg) for g, e in zip(gt, executed))


def lcs_match(gt: Sequence[Action], executed: Sequence[Action], cfg: ActionMatchConfig | None = None) -> bool:
    """True iff ``gt`` is a subsequence of ``executed``.

    Greedy earliest matching is exact here: taking the first executed action
    equal to the next ground-truth action never rules out a later match.
    """
    i = 0
    for e in executed:
        if i == len(gt):
            break
        if action_equal(gt[i], e, cfg):
            i += 1
    return i == len(gt)


def evaluate_actions(evaluator: str, trace: Trace, gt: Trace, cfg: ActionMatchConfig | None = None) -> bool:
    if evaluator == "stepwise":
        return stepwise_match(gt.actions, trace.actions, cfg)
    if evaluator == "lcs":
        return lcs_match(gt.actions, trace.actions, cfg)
    raise ConfigError(f"unknown baseline evaluator {evaluator!r}")
