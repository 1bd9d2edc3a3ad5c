"""Process-wide runtime services: transport, clocks, randomness and policies."""

from __future__ import annotations

import datetime as dt
import os
import random
import threading
import time
from collections.abc import Callable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Any

from braket_qdmi.braket.client import RetryPolicy
from braket_qdmi.braket.http import Transport, UrllibTransport


@dataclass(frozen=True)
class PollPolicy:
    """Interval schedule used by ``job_wait``."""

    initial: float = 1.0
    factor: float = 1.5
    cap: float = 10.0

    def intervals(self) -> Iterator[float]:
        interval = self.initial
        while True:
            yield interval
            interval = min(interval * self.factor, self.cap)


def _utcnow() -> dt.datetime:
    return dt.datetime.now(dt.timezone.utc)


def _default_backend_factory(params: Mapping, runtime: Runtime) -> Any:
    from braket_qdmi.braket.adapter import connect

    return connect(params, runtime)


@dataclass
class Runtime:
    """Everything the device needs from its environment, injectable for tests.

    ``clock``/``sleep`` drive ``job_wait``; ``now`` stamps request signatures;
    ``seed`` fixes client tokens and retry jitter.
    """

    transport: Transport | None = None
    clock: Callable[[], float] = time.monotonic
    sleep: Callable[[float], None] = time.sleep
    now: Callable[[], dt.datetime] = _utcnow
    seed: int | None = None
    environ: Mapping[str, str] = field(default_factory=lambda: os.environ)
    poll: PollPolicy = PollPolicy()
    retry: RetryPolicy = RetryPolicy()
    metadata_ttl: float = 60.0
    backend_factory: Callable[[Mapping, Runtime], Any] = _default_backend_factory

    def __post_init__(self) -> None:
        self._rng: random.Random | None = None
        self._rng_lock = threading.Lock()

    def setup(self) -> None:
        if self.transport is None:
            self.transport = UrllibTransport()
        self._rng = random.Random(self.seed)

    def spawn_rng(self) -> random.Random:
        """Independent generator derived from the runtime seed."""
        with self._rng_lock:
            if self._rng is None:
                self._rng = random.Random(self.seed)
            return random.Random(self._rng.getrandbits(64))
