"""Agent-facing environment API and trace recording.

One observation is recorded per agent action, holding the screen the action
was taken from. Status posts end the session.
"""

from __future__ import annotations

import base64
import threading
from enum import Enum

from ..errors import CoordinatesOutOfRangeError, SessionError, SessionTerminatedError
from ..trace import Action, ActionKind, Observation, TaskRecord, Trace, save_trace
from ..vh import node_at_point, parse_vh, xpath_of
from .device import Device, SimulatedDevice
from .pack import DeviceModel


class SessionStatus(str, Enum):
    RUNNING = "running"
    COMPLETE = "complete"
    IMPOSSIBLE = "impossible"


def _check_coords(**coords) -> None:
    for name, v in coords.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not 0.0 <= v <= 1.0:
            raise CoordinatesOutOfRangeError(f"{name}={v!r} is not a normalized coordinate")


class Session:
    def __init__(self, device: Device, task: TaskRecord):
        self.device = device
        self.task = task
        self.status = SessionStatus.RUNNING
        self.observations: list[Observation] = []
        self._lock = threading.RLock()

    @classmethod
    def simulated(cls, model: DeviceModel, task: TaskRecord, packages=None) -> Session:
        return cls(SimulatedDevice(model, packages), task)

    @property
    def running(self) -> bool:
        return self.status is SessionStatus.RUNNING

    def _require_running(self) -> None:
        if not self.running:
            raise SessionTerminatedError(f"session for {self.task.task_id} is {self.status.value}")

    # -- queries

    def get_task_instruction(self) -> str:
        self._require_running()
        return self.task.instruction

    def get_screenshot(self) -> bytes:
        """Current screenshot as PNG bytes."""
        with self._lock:
            self._require_running()
            return self.device.screenshot()

    def get_screenshot_base64(self) -> str:
        return base64.b64encode(self.get_screenshot()).decode("ascii")

    def get_view_hierarchy(self) -> str:
        with self._lock:
            self._require_running()
            return self.device.dump_vh()

    # -- actions

    def _record(self, action: Action) -> None:
        dev = self.device
        tree = parse_vh(dev.dump_vh())
        self.observations.append(
            Observation(
                step_index=len(self.observations),
                ui_tree=tree,
                activity=dev.current_activity(),
                action=action,
                screenshot=dev.screenshot(),
                packages=frozenset(dev.list_packages()),
            )
        )

    def post_click(self, x: float, y: float) -> None:
        with self._lock:
            self._require_running()
            _check_coords(x=x, y=y)
            tree = parse_vh(self.device.dump_vh())
            node = node_at_point(tree, x, y)
            self._record(Action.click(x, y, None if node is None else xpath_of(tree, node)))
            self.device.tap(x * tree.screen_w, y * tree.screen_h)

    def post_swipe(self, touch_x: float, touch_y: float, lift_x: float, lift_y: float, duration: int = 300) -> None:
        with self._lock:
            self._require_running()
            _check_coords(touch_x=touch_x, touch_y=touch_y, lift_x=lift_x, lift_y=lift_y)
            action = Action.swipe(touch_x, touch_y, lift_x, lift_y, int(duration))
            tree = parse_vh(self.device.dump_vh())
            w, h = tree.screen_w, tree.screen_h
            self._record(action)
            self.device.swipe(touch_x * w, touch_y * h, lift_x * w, lift_y * h, int(duration))

    def post_type(self, text: str) -> None:
        with self._lock:
            self._require_running()
            self._record(Action.type_text(text))
            self.device.input_text(text)

    def post_press_home(self) -> None:
        with self._lock:
            self._require_running()
            self._record(Action.of(ActionKind.PRESS_HOME))
            self.device.keyevent("HOME")

    def post_press_back(self) -> None:
        with self._lock:
            self._require_running()
            self._record(Action.of(ActionKind.PRESS_BACK))
            self.device.keyevent("BACK")

    def post_task_complete(self) -> None:
        with self._lock:
            self._require_running()
            self._record(Action.of(ActionKind.STATUS_COMPLETE))
            self.status = SessionStatus.COMPLETE

    def post_task_impossible(self) -> None:
        with self._lock:
            self._require_running()
            self._record(Action.of(ActionKind.STATUS_IMPOSSIBLE))
            self.status = SessionStatus.IMPOSSIBLE

    # -- recording

    def to_trace(self) -> Trace:
        if not self.observations:
            raise SessionError("nothing recorded yet")
        return Trace(self.task, tuple(self.observations))


def record_session(session: Session, out_dir) -> Trace:
    """Write a finished session in the trace layout and return the trace."""
    if session.running:
        raise SessionError("session is still running")
    trace = session.to_trace()
    save_trace(trace, out_dir)
    return trace
