"""Device backends.

``Device`` is the low-level surface a session drives: the same command set
an external real-device driver speaks (see ``driver.py``). Coordinates here
are screen pixels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

from ..trace import ActionKind
from ..vh import UiTree, node_at_pixel, parse_vh, resolve_xpath, serialize_vh, xpath_of
from .pack import DeviceModel, Transition
from .render import render_screenshot

KEYS = {"HOME": ActionKind.PRESS_HOME, "BACK": ActionKind.PRESS_BACK}


class Device(Protocol):
    def dump_vh(self) -> str: ...
    def screenshot(self) -> bytes: ...
    def current_activity(self) -> str: ...
    def list_packages(self) -> set[str]: ...
    def tap(self, x: float, y: float) -> None: ...
    def swipe(self, x1: float, y1: float, x2: float, y2: float, duration_ms: int) -> None: ...
    def input_text(self, text: str) -> None: ...
    def keyevent(self, key: str) -> None: ...


def swipe_direction(dx: float, dy: float) -> str | None:
    """Direction of finger travel along the dominant axis."""
    if dx == 0 and dy == 0:
        return None
    if abs(dy) >= abs(dx):
        return "up" if dy < 0 else "down"
    return "left" if dx < 0 else "right"


@dataclass
class DeviceState:
    screen_id: str
    packages: set[str]
    overrides: dict[tuple[str, str], str] = field(default_factory=dict)  # (screen, xpath) -> text
    focused: str | None = None

    def key(self) -> tuple:
        return (self.screen_id, tuple(sorted(self.packages)), tuple(sorted(self.overrides.items())), self.focused)


class SimulatedDevice:
    """A device whose screens and transitions come from an app pack."""

    def __init__(self, model: DeviceModel, packages=None):
        self.model = model
        pkgs = set(model.initial_packages if packages is None else packages)
        self.state = DeviceState(model.initial_screen(pkgs), pkgs)
        self.state.focused = self._entry_focus(self.state.screen_id)
        self._cache: dict[tuple, tuple[UiTree, str, bytes | None]] = {}

    @property
    def screen(self):
        return self.model.screens[self.state.screen_id]

    def _entry_focus(self, screen_id: str) -> str | None:
        tree = self.model.screens[screen_id].tree
        for node in tree.nodes:
            if node.flag("focused") and "EditText" in node.cls:
                return xpath_of(tree, node)
        return None

    def _render(self) -> tuple[UiTree, str, bytes | None]:
        sid = self.state.screen_id
        ov = tuple(sorted((xp, text) for (s, xp), text in self.state.overrides.items() if s == sid))
        key = (sid, ov)
        hit = self._cache.get(key)
        if hit is None:
            tree = parse_vh(self.screen.vh, self.model.screen_size)
            for xp, text in ov:
                resolve_xpath(tree, xp).attrs["text"] = text
            hit = (tree, serialize_vh(tree), None)
            self._cache[key] = hit
        return hit

    def current_tree(self) -> UiTree:
        return self._render()[0]

    def _text_of(self, screen_id: str, xpath: str) -> str:
        if (screen_id, xpath) in self.state.overrides:
            return self.state.overrides[(screen_id, xpath)]
        return resolve_xpath(self.model.screens[screen_id].tree, xpath).text

    # -- device commands

    def dump_vh(self) -> str:
        return self._render()[1]

    def screenshot(self) -> bytes:
        tree, vh, png = self._render()
        if png is None:
            png = render_screenshot(tree, self.screen.background)
            sid = self.state.screen_id
            ov = tuple(sorted((xp, t) for (s, xp), t in self.state.overrides.items() if s == sid))
            self._cache[(sid, ov)] = (tree, vh, png)
        return png

    def current_activity(self) -> str:
        return self.screen.activity

    def list_packages(self) -> set[str]:
        return set(self.state.packages)

    def tap(self, x: float, y: float) -> None:
        tree = self.current_tree()
        node = node_at_pixel(tree, x, y)
        xpath = None if node is None else xpath_of(tree, node)
        if node is not None and "EditText" in node.cls:
            self.state.focused = xpath
        self._dispatch(ActionKind.CLICK, xpath=xpath)

    def swipe(self, x1: float, y1: float, x2: float, y2: float, duration_ms: int) -> None:
        self._dispatch(ActionKind.SWIPE, direction=swipe_direction(x2 - x1, y2 - y1))

    def input_text(self, text: str) -> None:
        st = self.state
        if st.focused is not None:
            k = (st.screen_id, st.focused)
            st.overrides[k] = st.overrides.get(k, "") + text
        self._dispatch(ActionKind.TYPE)

    def keyevent(self, key: str) -> None:
        if key not in KEYS:
            raise ValueError(f"unsupported key {key!r}")
        self._dispatch(KEYS[key])

    # -- state machine

    def _dispatch(self, kind: ActionKind, xpath: str | None = None, direction: str | None = None) -> None:
        t = self.model.find_transition(self.state.screen_id, self.state.packages, kind, xpath, direction)
        if t is not None:
            self._fire(t)

    def _fire(self, t: Transition) -> None:
        st = self.state
        source = st.screen_id
        for eff in t.effects:
            (name, arg), = eff.items()
            if name == "install":
                st.packages.add(arg)
            elif name == "uninstall":
                st.packages.discard(arg)
            elif name == "set_text":
                st.overrides[(t.target, arg["xpath"])] = arg["text"]
            elif name == "carry_text":
                st.overrides[(t.target, arg["to"])] = self._text_of(source, arg["from"])
        st.screen_id = t.target
        st.focused = self._entry_focus(t.target)
