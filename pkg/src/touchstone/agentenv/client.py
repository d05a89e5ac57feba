"""Client for the HTTP agent API, exposing the same methods as ``Session``."""

from __future__ import annotations

import base64
import json
import urllib.error
import urllib.request
from urllib.parse import quote

from ..errors import CoordinatesOutOfRangeError, SessionError, SessionTerminatedError
from ..trace import TaskRecord


class AgentEnvClient:
    def __init__(self, base_url: str, session: str | None = None, timeout: float = 10.0):
        self.base_url = base_url.rstrip("/")
        self.session = session
        self.timeout = timeout
        self.last_trace: str | None = None

    def _call(self, method: str, route: str, body: dict | None = None) -> dict:
        url = self.base_url + route
        if self.session and route != "/sessions":
            url += "?session=" + quote(self.session)
        data = None if body is None else json.dumps(body).encode("utf-8")
        req = urllib.request.Request(url, data=data, method=method, headers={"Content-Type": "application/json"})
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return json.loads(resp.read())
        except urllib.error.HTTPError as exc:
            try:
                msg = json.loads(exc.read()).get("error", str(exc))
            except ValueError:
                msg = str(exc)
            if exc.code == 409:
                raise SessionTerminatedError(msg) from None
            if exc.code == 400 and "coordinate" in msg:
                raise CoordinatesOutOfRangeError(msg) from None
            raise SessionError(f"HTTP {exc.code}: {msg}") from None

    def create_session(self, task: TaskRecord, packages=None) -> str:
        body = {"task": task.to_json()}
        if packages is not None:
            body["packages"] = sorted(packages)
        self.session = self._call("POST", "/sessions", body)["session"]
        return self.session

    def get_task_instruction(self) -> str:
        return self._call("GET", "/task_instruction")["instruction"]

    def get_screenshot(self) -> bytes:
        return base64.b64decode(self.get_screenshot_base64())

    def get_screenshot_base64(self) -> str:
        return self._call("GET", "/screenshot")["screenshot"]

    def get_view_hierarchy(self) -> str:
        return self._call("GET", "/view_hierarchy")["view_hierarchy"]

    def post_click(self, x: float, y: float) -> None:
        self._call("POST", "/click", {"x": x, "y": y})

    def post_swipe(self, touch_x: float, touch_y: float, lift_x: float, lift_y: float, duration: int = 300) -> None:
        self._call("POST", "/swipe", {"touch_x": touch_x, "touch_y": touch_y, "lift_x": lift_x, "lift_y": lift_y,
                                      "duration": duration})

    def post_type(self, text: str) -> None:
        self._call("POST", "/type", {"text": text})

    def post_press_home(self) -> None:
        self._call("POST", "/press_home", {})

    def post_press_back(self) -> None:
        self._call("POST", "/press_back", {})

    def post_task_complete(self) -> None:
        self.last_trace = self._call("POST", "/task_complete", {}).get("trace")

    def post_task_impossible(self) -> None:
        self.last_trace = self._call("POST", "/task_impossible", {}).get("trace")
