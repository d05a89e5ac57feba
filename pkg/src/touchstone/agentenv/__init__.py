"""Simulated Android environment: app packs, sessions, recording and serving."""

from .device import Device, DeviceState, SimulatedDevice
from .pack import DeviceModel, load_app_pack, parse_app_pack
from .script import Script, load_script, run_script
from .session import Session, SessionStatus, record_session

__all__ = [
    "Device",
    "DeviceModel",
    "DeviceState",
    "Script",
    "Session",
    "SessionStatus",
    "SimulatedDevice",
    "load_app_pack",
    "load_script",
    "parse_app_pack",
    "record_session",
    "run_script",
]
