"""Newline-delimited JSON device driver protocol.

A driver is a subprocess reading one request per line on stdin and writing
one response per line on stdout::

    {"id": 1, "cmd": "tap", "x": 540, "y": 1200}
    {"id": 1, "ok": true, "result": null}

Commands and their results:

    dump_vh                          -> xml string
    screenshot                       -> base64 PNG
    current_activity                 -> string
    list_packages                    -> sorted list of package ids
    tap {x, y}                       -> null   (screen pixels)
    swipe {x1, y1, x2, y2, duration_ms} -> null
    input_text {text}                -> null
    keyevent {key: "HOME"|"BACK"}    -> null

Failures answer ``{"id": .., "ok": false, "error": message}``. An adb-backed
driver only has to speak this protocol to stand in for the simulator;
``python -m touchstone.agentenv.driver --pack PACK`` serves a simulated one.
"""

from __future__ import annotations

import argparse
import base64
import itertools
import json
import subprocess
import sys

from ..errors import SessionError


def _dispatch(device, req: dict):
    cmd = req.get("cmd")
    if cmd == "dump_vh":
        return device.dump_vh()
    if cmd == "screenshot":
        return base64.b64encode(device.screenshot()).decode("ascii")
    if cmd == "current_activity":
        return device.current_activity()
    if cmd == "list_packages":
        return sorted(device.list_packages())
    if cmd == "tap":
        return device.tap(req["x"], req["y"])
    if cmd == "swipe":
        return device.swipe(req["x1"], req["y1"], req["x2"], req["y2"], req["duration_ms"])
    if cmd == "input_text":
        return device.input_text(req["text"])
    if cmd == "keyevent":
        return device.keyevent(req["key"])
    raise ValueError(f"unknown command {cmd!r}")


def serve_stdio(device, stdin=None, stdout=None) -> None:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    for line in stdin:
        if not line.strip():
            continue
        req_id = None
        try:
            req = json.loads(line)
            req_id = req.get("id")
            resp = {"id": req_id, "ok": True, "result": _dispatch(device, req)}
        except Exception as exc:  # report every failure to the caller
            resp = {"id": req_id, "ok": False, "error": f"{type(exc).__name__}: {exc}"}
        stdout.write(json.dumps(resp) + "\n")
        stdout.flush()


class DriverDevice:
    """A ``Device`` backed by a driver subprocess."""

    def __init__(self, argv: list[str]):
        self.proc = subprocess.Popen(argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True, encoding="utf-8")
        self._ids = itertools.count(1)

    def _call(self, cmd: str, **params):
        req_id = next(self._ids)
        self.proc.stdin.write(json.dumps({"id": req_id, "cmd": cmd, **params}) + "\n")
        self.proc.stdin.flush()
        line = self.proc.stdout.readline()
        if not line:
            raise SessionError("driver exited")
        resp = json.loads(line)
        if resp.get("id") != req_id:
            raise SessionError(f"driver answered request {resp.get('id')} instead of {req_id}")
        if not resp.get("ok"):
            raise SessionError(f"driver error: {resp.get('error')}")
        return resp.get("result")

    def dump_vh(self) -> str:
        return self._call("dump_vh")

    def screenshot(self) -> bytes:
        return base64.b64decode(self._call("screenshot"))

    def current_activity(self) -> str:
        return self._call("current_activity")

    def list_packages(self) -> set[str]:
        return set(self._call("list_packages"))

    def tap(self, x: float, y: float) -> None:
        self._call("tap", x=x, y=y)

    def swipe(self, x1: float, y1: float, x2: float, y2: float, duration_ms: int) -> None:
        self._call("swipe", x1=x1, y1=y1, x2=x2, y2=y2, duration_ms=duration_ms)

    def input_text(self, text: str) -> None:
        self._call("input_text", text=text)

    def keyevent(self, key: str) -> None:
        self._call("keyevent", key=key)

    def close(self) -> None:
        if self.proc.poll() is None:
            self.proc.stdin.close()
            self.proc.wait(timeout=10)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def main(argv=None) -> int:
    from .device import SimulatedDevice
    from .pack import load_app_pack

    ap = argparse.ArgumentParser(description="serve a simulated device over the stdio driver protocol")
    ap.add_argument("--pack", required=True)
    ap.add_argument("--packages", help="comma-separated initial packages (default: the pack's)")
    args = ap.parse_args(argv)
    packages = None if args.packages is None else [p for p in args.packages.split(",") if p]
    serve_stdio(SimulatedDevice(load_app_pack(args.pack), packages))
    return 0


if __name__ == "__main__":
    sys.exit(main())
