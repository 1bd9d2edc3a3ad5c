"""Flat, foreign-function-shaped export surface over :mod:`braket_qdmi.device.core`.

Every symbol carries the ``BRAKET_QDMI_`` prefix, takes and returns plain integers
and byte strings, and never raises. Handles are opaque positive integers.

Parameter values are ``(key, size, buffer)`` triples:

* strings: UTF-8; a single trailing NUL is allowed and ignored
* integers: 8-byte little-endian signed
* reals (query results only): 8-byte little-endian IEEE double

Query functions follow the usual two-call protocol: pass ``size=0`` to learn the
required size, then call again with a buffer size at least that large. They
return ``(status, data, size_ret)``; ``data`` is ``b""`` on a size probe.
"""

from __future__ import annotations

import itertools
import struct
import threading
from enum import IntEnum
from typing import Any

from braket_qdmi.enums import (
    DeviceProperty,
    DeviceStatus,
    JobParameter,
    OperationProperty,
    SessionParameter,
    SiteProperty,
)
from braket_qdmi.errors import StatusCode

from . import core

PREFIX = "BRAKET_QDMI_"
_INT64 = struct.Struct("<q")
_FLOAT64 = struct.Struct("<d")

_INT_SESSION_PARAMS = {SessionParameter.CUSTOM_QUEUE_THRESHOLD}
_INT_JOB_PARAMS = {JobParameter.SHOTS}


class ResultKey(IntEnum):
    HIST_KEYS = 0  # comma-separated bitstrings, NUL-terminated
    HIST_VALUES = 1  # uint64 little-endian counts, same order as HIST_KEYS
    SHOTS = 2  # int64
    MEASURED_QUBITS = 3  # int64 array


class _Handles:
    def __init__(self) -> None:
        self._objects: dict[int, Any] = {}
        self._ids = itertools.count(1)
        self._lock = threading.Lock()

    def add(self, obj: Any) -> int:
        with self._lock:
            handle = next(self._ids)
            self._objects[handle] = obj
            return handle

    def get(self, handle: int, kind: type) -> Any:
        with self._lock:
            obj = self._objects.get(handle) if isinstance(handle, int) else None
        return obj if isinstance(obj, kind) else None

    def clear(self) -> None:
        with self._lock:
            self._objects.clear()


_handles = _Handles()
_BAD = StatusCode.ERROR_INVALID_ARGUMENT


def _decode_string(size: int, buf: bytes) -> str | None:
    if not isinstance(buf, (bytes, bytearray)) or size != len(buf) or size == 0:
        return None
    raw = bytes(buf)
    if raw.endswith(b"\0"):
        raw = raw[:-1]
    if b"\0" in raw:
        return None
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        return None


def _decode_int(size: int, buf: bytes) -> int | None:
    if not isinstance(buf, (bytes, bytearray)) or size != _INT64.size or len(buf) != size:
        return None
    return _INT64.unpack(bytes(buf))[0]


def _encode(value: Any) -> bytes:
    if isinstance(value, (bool, DeviceStatus)):
        return _INT64.pack(int(value))
    if isinstance(value, int):
        return _INT64.pack(value)
    if isinstance(value, float):
        return _FLOAT64.pack(value)
    return str(value).encode("utf-8") + b"\0"


def _answer(status: StatusCode, value: Any, size: int) -> tuple[int, bytes, int]:
    if status is not StatusCode.SUCCESS:
        return int(status), b"", 0
    data = value if isinstance(value, bytes) else _encode(value)
    if not isinstance(size, int) or size < 0:
        return int(_BAD), b"", 0
    if size == 0:
        return int(StatusCode.SUCCESS), b"", len(data)
    if size < len(data):
        return int(_BAD), b"", len(data)
    return int(StatusCode.SUCCESS), data, len(data)


def _as_enum(enum_cls: type, key: int):
    try:
        return enum_cls(key)
    except (ValueError, TypeError):
        return None


# device


def BRAKET_QDMI_device_initialize() -> int:
    return int(core.device_initialize())


def BRAKET_QDMI_device_finalize() -> int:
    status = core.device_finalize()
    if status is StatusCode.SUCCESS:
        _handles.clear()
    return int(status)


# sessions


def BRAKET_QDMI_session_alloc() -> tuple[int, int]:
    status, session = core.session_alloc()
    if status is not StatusCode.SUCCESS:
        return int(status), 0
    return int(status), _handles.add(session)


def BRAKET_QDMI_session_set_parameter(session: int, key: int, size: int, value: bytes) -> int:
    obj = _handles.get(session, core.Session)
    param = _as_enum(SessionParameter, key)
    if obj is None:
        return int(_BAD)
    if param is None:
        # an unknown key is a capability question, not a malformed call
        return int(StatusCode.ERROR_NOT_SUPPORTED)
    decoded = _decode_int(size, value) if param in _INT_SESSION_PARAMS else _decode_string(size, value)
    if decoded is None:
        return int(_BAD)
    return int(core.session_set_parameter(obj, param, decoded))


def BRAKET_QDMI_session_init(session: int) -> int:
    obj = _handles.get(session, core.Session)
    return int(_BAD) if obj is None else int(core.session_init(obj))


def BRAKET_QDMI_session_free(session: int) -> int:
    obj = _handles.get(session, core.Session)
    return int(_BAD) if obj is None else int(core.session_free(obj))


def BRAKET_QDMI_session_query_device_property(session: int, key: int, size: int) -> tuple[int, bytes, int]:
    obj = _handles.get(session, core.Session)
    if obj is None:
        return int(_BAD), b"", 0
    prop = _as_enum(DeviceProperty, key)
    if prop is None:
        return int(StatusCode.ERROR_NOT_SUPPORTED), b"", 0
    status, value = core.session_query_device_property(obj, prop)
    return _answer(status, value, size)


def BRAKET_QDMI_session_query_site_property(
    session: int, site: int, key: int, size: int
) -> tuple[int, bytes, int]:
    obj = _handles.get(session, core.Session)
    if obj is None:
        return int(_BAD), b"", 0
    prop = _as_enum(SiteProperty, key)
    if prop is None:
        return int(StatusCode.ERROR_NOT_SUPPORTED), b"", 0
    status, value = core.session_query_site_property(obj, site, prop)
    return _answer(status, value, size)


def BRAKET_QDMI_session_query_operation_property(
    session: int,
    name_size: int,
    name: bytes,
    num_sites: int,
    sites: tuple[int, ...],
    key: int,
    size: int,
) -> tuple[int, bytes, int]:
    obj = _handles.get(session, core.Session)
    op = _decode_string(name_size, name)
    if obj is None or op is None or not isinstance(num_sites, int) or len(sites) != num_sites:
        return int(_BAD), b"", 0
    prop = _as_enum(OperationProperty, key)
    if prop is None:
        return int(StatusCode.ERROR_NOT_SUPPORTED), b"", 0
    status, value = core.session_query_operation_property(obj, op, list(sites), prop)
    return _answer(status, value, size)


def BRAKET_QDMI_session_create_device_job(session: int) -> tuple[int, int]:
    obj = _handles.get(session, core.Session)
    if obj is None:
        return int(_BAD), 0
    status, job = core.session_create_device_job(obj)
    if status is not StatusCode.SUCCESS:
        return int(status), 0
    return int(status), _handles.add(job)


# jobs


def BRAKET_QDMI_job_set_parameter(job: int, key: int, size: int, value: bytes) -> int:
    obj = _handles.get(job, core.Job)
    param = _as_enum(JobParameter, key)
    if obj is None:
        return int(_BAD)
    if param is None:
        return int(StatusCode.ERROR_NOT_SUPPORTED)
    decoded = _decode_int(size, value) if param in _INT_JOB_PARAMS else _decode_string(size, value)
    if decoded is None:
        return int(_BAD)
    return int(core.job_set_parameter(obj, param, decoded))


def BRAKET_QDMI_job_submit(job: int) -> int:
    obj = _handles.get(job, core.Job)
    return int(_BAD) if obj is None else int(core.job_submit(obj))


def BRAKET_QDMI_job_check(job: int) -> tuple[int, int, int]:
    """Returns ``(status, job_status, queue_position)``; absent values are -1."""
    obj = _handles.get(job, core.Job)
    if obj is None:
        return int(_BAD), -1, -1
    status, job_status, position = core.job_check(obj)
    if status is not StatusCode.SUCCESS:
        return int(status), -1, -1
    return int(status), int(job_status), -1 if position is None else position


def BRAKET_QDMI_job_wait(job: int, timeout_ms: int) -> int:
    """A negative timeout waits indefinitely."""
    obj = _handles.get(job, core.Job)
    if obj is None or not isinstance(timeout_ms, int):
        return int(_BAD)
    return int(core.job_wait(obj, None if timeout_ms < 0 else timeout_ms / 1000.0))


def BRAKET_QDMI_job_get_results(job: int, key: int, size: int) -> tuple[int, bytes, int]:
    obj = _handles.get(job, core.Job)
    if obj is None:
        return int(_BAD), b"", 0
    result_key = _as_enum(ResultKey, key)
    if result_key is None:
        return int(StatusCode.ERROR_NOT_SUPPORTED), b"", 0
    status, histogram = core.job_get_results(obj)
    if status is not StatusCode.SUCCESS:
        return int(status), b"", 0
    keys = sorted(histogram.counts)
    if result_key is ResultKey.HIST_KEYS:
        value: Any = ",".join(keys).encode("ascii") + b"\0"
    elif result_key is ResultKey.HIST_VALUES:
        value = struct.pack(f"<{len(keys)}Q", *(histogram.counts[k] for k in keys))
    elif result_key is ResultKey.SHOTS:
        value = histogram.shots
    else:
        value = struct.pack(f"<{len(histogram.measured_qubits)}q", *histogram.measured_qubits)
    return _answer(StatusCode.SUCCESS, value, size)


def BRAKET_QDMI_job_cancel(job: int) -> int:
    obj = _handles.get(job, core.Job)
    return int(_BAD) if obj is None else int(core.job_cancel(obj))


def BRAKET_QDMI_job_free(job: int) -> int:
    obj = _handles.get(job, core.Job)
    return int(_BAD) if obj is None else int(core.job_free(obj))


EXPORTS = {name: obj for name, obj in globals().items() if name.startswith(PREFIX)}
