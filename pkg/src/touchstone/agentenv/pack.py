"""App packs: scripted mock apps as screen state machines.

An app pack is one JSON document::

    {
      "app_id": "excel",
      "screen_size": [1080, 2400],
      "initial_packages": ["com.android.vending"],
      "initial_screen": [{"screen": "home_excel", "when": {"installed": "com.microsoft.office.excel"}},
                         {"screen": "home"}],
      "screens": {
        "home": {"activity": "com.android.launcher3.Launcher", "vh": "<hierarchy>...</hierarchy>",
                 "background": "#f0f0f0"}
      },
      "transitions": [
        {"from": "home", "on": {"kind": "click", "xpath": "/hierarchy/node[1]/node[2]"},
         "to": "store_home", "effects": [{"install": "com.example"}]}
      ]
    }

``initial_screen`` may also be a plain screen id. ``from: "*"`` declares a
transition available on every screen; a screen's own transitions take
precedence over it. Triggers:

* ``{"kind": "click", "xpath": X}`` - a click resolving to X or a node below it
* ``{"kind": "swipe", "direction": "up"|"down"|"left"|"right"}`` (direction optional)
* ``{"kind": "type"}``, ``{"kind": "press_back"}``, ``{"kind": "press_home"}``

Guards (``when``): ``{"installed": pkg}`` or ``{"not_installed": pkg}``.
Effects: ``install``, ``uninstall``, ``set_text`` ({xpath, text} on the
target screen), ``carry_text`` ({from, to}: copy a node's current text from
the source screen to the target screen).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

from ..errors import AmbiguousTransitionError, DanglingScreenError, PackSyntaxError, VhError
from ..trace import ActionKind
from ..vh import UiTree, parse_vh, resolve_xpath

ANY_SCREEN = "*"
DIRECTIONS = ("up", "down", "left", "right")
_TRIGGER_KINDS = (ActionKind.CLICK, ActionKind.SWIPE, ActionKind.TYPE, ActionKind.PRESS_BACK, ActionKind.PRESS_HOME)


@dataclass(frozen=True)
class Screen:
    screen_id: str
    activity: str
    vh: str
    tree: UiTree = field(repr=False, compare=False)
    background: str = "#ffffff"


@dataclass(frozen=True)
class Guard:
    installed: str | None = None
    not_installed: str | None = None

    def holds(self, packages) -> bool:
        if self.installed is not None and self.installed not in packages:
            return False
        if self.not_installed is not None and self.not_installed in packages:
            return False
        return True

    def excludes(self, other: Guard) -> bool:
        """True when no package set satisfies both guards."""
        return (
            (self.installed is not None and self.installed == other.not_installed)
            or (self.not_installed is not None and self.not_installed == other.installed)
        )


@dataclass(frozen=True)
class Trigger:
    kind: ActionKind
    xpath: str | None = None
    direction: str | None = None

    def matches(self, kind: ActionKind, xpath: str | None = None, direction: str | None = None) -> bool:
        if kind is not self.kind:
            return False
        if kind is ActionKind.CLICK:
            return xpath is not None and (xpath == self.xpath or xpath.startswith(self.xpath + "/"))
        if kind is ActionKind.SWIPE:
            return self.direction is None or self.direction == direction
        return True

    def overlaps(self, other: Trigger) -> bool:
        if self.kind is not other.kind:
            return False
        if self.kind is ActionKind.CLICK:
            a, b = self.xpath, other.xpath
            return a == b or a.startswith(b + "/") or b.startswith(a + "/")
        if self.kind is ActionKind.SWIPE:
            return self.direction is None or other.direction is None or self.direction == other.direction
        return True


@dataclass(frozen=True)
class Transition:
    source: str
    trigger: Trigger
    target: str
    guard: Guard = Guard()
    effects: tuple[dict, ...] = ()


@dataclass
class DeviceModel:
    app_id: str
    screens: dict[str, Screen]
    transitions: list[Transition]
    initial: list[tuple[str, Guard]]
    initial_packages: frozenset[str] = frozenset()
    screen_size: tuple[int, int] = (1080, 2400)

    def initial_screen(self, packages) -> str:
        for screen_id, guard in self.initial:
            if guard.holds(packages):
                return screen_id
        raise PackSyntaxError("no initial screen guard holds for the starting packages")

    def find_transition(self, screen_id: str, packages, kind: ActionKind, xpath: str | None = None,
                        direction: str | None = None) -> Transition | None:
        for scope in (screen_id, ANY_SCREEN):
            hits = [
                t for t in self.transitions
                if t.source == scope and t.guard.holds(packages) and t.trigger.matches(kind, xpath, direction)
            ]
            if len(hits) > 1:
                raise AmbiguousTransitionError(f"{len(hits)} transitions fire on {screen_id} for {kind.value}")
            if hits:
                return hits[0]
        return None


# -- loading ----------------------------------------------------------------------

def _req(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise PackSyntaxError(f"{where}: missing {key!r}")
    return obj[key]


def _guard(spec, where: str) -> Guard:
    if spec is None:
        return Guard()
    if not isinstance(spec, dict) or not set(spec) <= {"installed", "not_installed"}:
        raise PackSyntaxError(f"{where}: bad guard {spec!r}")
    return Guard(spec.get("installed"), spec.get("not_installed"))


def _trigger(spec, where: str) -> Trigger:
    kind_name = _req(spec, "kind", where)
    try:
        kind = ActionKind(kind_name)
    except ValueError:
        raise PackSyntaxError(f"{where}: unknown trigger kind {kind_name!r}") from None
    if kind not in _TRIGGER_KINDS:
        raise PackSyntaxError(f"{where}: {kind.value} cannot trigger a transition")
    if kind is ActionKind.CLICK:
        return Trigger(kind, xpath=_req(spec, "xpath", where))
    if kind is ActionKind.SWIPE:
        direction = spec.get("direction")
        if direction is not None and direction not in DIRECTIONS:
            raise PackSyntaxError(f"{where}: bad swipe direction {direction!r}")
        return Trigger(kind, direction=direction)
    return Trigger(kind)


def _check_xpath(screen: Screen, xpath, where: str) -> None:
    try:
        resolve_xpath(screen.tree, xpath)
    except (VhError, TypeError) as exc:
        raise PackSyntaxError(f"{where}: {xpath!r} not on screen {screen.screen_id!r}: {exc}") from None


def parse_app_pack(doc: dict) -> DeviceModel:
    if not isinstance(doc, dict):
        raise PackSyntaxError("app pack must be a JSON object")
    app_id = _req(doc, "app_id", "pack")
    size = doc.get("screen_size", [1080, 2400])
    if not (isinstance(size, list) and len(size) == 2 and all(isinstance(v, int) and v > 0 for v in size)):
        raise PackSyntaxError(f"bad screen_size {size!r}")
    screen_size = (size[0], size[1])

    screens: dict[str, Screen] = {}
    for sid, spec in _req(doc, "screens", "pack").items():
        if sid == ANY_SCREEN:
            raise PackSyntaxError("'*' is reserved")
        where = f"screen {sid!r}"
        vh = _req(spec, "vh", where)
        try:
            tree = parse_vh(vh, screen_size)
        except VhError as exc:
            raise PackSyntaxError(f"{where}: {exc}") from None
        activity = _req(spec, "activity", where)
        if not activity:
            raise PackSyntaxError(f"{where}: empty activity")
        screens[sid] = Screen(sid, activity, vh, tree, spec.get("background", "#ffffff"))
    if not screens:
        raise PackSyntaxError("pack has no screens")

    init = _req(doc, "initial_screen", "pack")
    if isinstance(init, str):
        initial = [(init, Guard())]
    elif isinstance(init, list) and init:
        initial = [(_req(e, "screen", "initial_screen"), _guard(e.get("when"), "initial_screen")) for e in init]
    else:
        raise PackSyntaxError("initial_screen must be a screen id or a nonempty list")
    for sid, _ in initial:
        if sid not in screens:
            raise DanglingScreenError(f"initial screen {sid!r} does not exist")

    transitions = []
    for i, spec in enumerate(doc.get("transitions", [])):
        where = f"transition #{i}"
        source, target = _req(spec, "from", where), _req(spec, "to", where)
        if source != ANY_SCREEN and source not in screens:
            raise DanglingScreenError(f"{where}: unknown source screen {source!r}")
        if target not in screens:
            raise DanglingScreenError(f"{where}: unknown target screen {target!r}")
        trigger = _trigger(_req(spec, "on", where), where)
        if trigger.kind is ActionKind.CLICK and source != ANY_SCREEN:
            _check_xpath(screens[source], trigger.xpath, where)
        effects = tuple(spec.get("effects", ()))
        for eff in effects:
            _check_effect(eff, screens.get(source), screens[target], where)
        transitions.append(Transition(source, trigger, target, _guard(spec.get("when"), where), effects))

    for a, b in combinations(transitions, 2):
        if a.source == b.source and a.trigger.overlaps(b.trigger) and not a.guard.excludes(b.guard):
            raise AmbiguousTransitionError(
                f"transitions to {a.target!r} and {b.target!r} both fire on {a.source!r} for {a.trigger.kind.value}"
            )

    packages = doc.get("initial_packages", [])
    if not isinstance(packages, list) or not all(isinstance(p, str) and p for p in packages):
        raise PackSyntaxError("initial_packages must be a list of package ids")
    return DeviceModel(app_id, screens, transitions, initial, frozenset(packages), screen_size)


def _check_effect(eff, source: Screen | None, target: Screen, where: str) -> None:
    if not isinstance(eff, dict) or len(eff) != 1:
        raise PackSyntaxError(f"{where}: effect must be a one-key object, got {eff!r}")
    (name, arg), = eff.items()
    if name in ("install", "uninstall"):
        if not isinstance(arg, str) or not arg:
            raise PackSyntaxError(f"{where}: {name} needs a package id")
    elif name == "set_text":
        _check_xpath(target, _req(arg, "xpath", where), where)
        if not isinstance(_req(arg, "text", where), str):
            raise PackSyntaxError(f"{where}: set_text needs a string")
    elif name == "carry_text":
        if source is None:
            raise PackSyntaxError(f"{where}: carry_text needs a concrete source screen")
        _check_xpath(source, _req(arg, "from", where), where)
        _check_xpath(target, _req(arg, "to", where), where)
    else:
        raise PackSyntaxError(f"{where}: unknown effect {name!r}")


def load_app_pack(path) -> DeviceModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise PackSyntaxError(f"{path}: {exc}") from None
    return parse_app_pack(doc)
