"""Virtual time for the mock service."""

from __future__ import annotations

import threading
import time
from enum import Enum


class ClockMode(Enum):
    REALTIME = "realtime"
    MANUAL = "manual"


class VirtualClock:
    """Seconds since service start; in MANUAL mode time moves only through :meth:`advance`."""

    def __init__(self, mode: ClockMode = ClockMode.MANUAL, start: float = 0.0) -> None:
        self.mode = mode
        self._now = start
        self._origin = time.monotonic() - start
        self._lock = threading.Lock()

    def now(self) -> float:
        if self.mode is ClockMode.REALTIME:
            return time.monotonic() - self._origin
        with self._lock:
            return self._now

    def advance(self, seconds: float) -> float:
        if self.mode is not ClockMode.MANUAL:
            raise RuntimeError("only a MANUAL clock can be advanced")
        if seconds < 0:
            raise ValueError("cannot move time backwards")
        with self._lock:
            self._now += seconds
            return self._now
