"""Hermetic stand-in for the quantum-task cloud: catalog, queue, signer check, object store."""

from .clock import ClockMode, VirtualClock
from .server import MockServer
from .service import (
    Latencies,
    MockCloud,
    MockConfigError,
    MockDeviceEntry,
    MockTaskRecord,
    start,
)
from .verifier import Identity, SignatureError, verify

__all__ = [
    "ClockMode",
    "Identity",
    "Latencies",
    "MockCloud",
    "MockConfigError",
    "MockDeviceEntry",
    "MockServer",
    "MockTaskRecord",
    "SignatureError",
    "VirtualClock",
    "start",
    "verify",
]
