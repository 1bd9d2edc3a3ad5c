"""Deterministic in-memory stand-in for the quantum-task API and its object store.

The service is a callable transport (``HttpRequest -> HttpResponse``) so clients
can talk to it in-process, and :meth:`MockCloud.serve` exposes the same handler
over plain HTTP. Routing:

* ``/_mock/...``                           unsigned test hooks (advance, inspect)
* credential scope service ``braket``      quantum-task and device endpoints
* credential scope service ``s3``          ``GET /<bucket>/<key>``

Test-only request headers on task creation:

* ``x-mock-script``: JSON list of ``[seconds_after_creation, "STATUS"]`` pairs
  replacing the default transition script.
* ``x-mock-fail``: ``FAILED`` or ``NOT_SET``; replaces the terminal transition.
"""

from __future__ import annotations

import json
import logging
import random
import re
import threading
import uuid
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any
from urllib.parse import unquote, urlsplit

import numpy as np

from braket_qdmi import qasm
from braket_qdmi.braket.http import HttpRequest, HttpResponse
from braket_qdmi.braket.status import BraketDeviceStatus, BraketTaskStatus

from .clock import ClockMode, VirtualClock
from .verifier import SignatureError, verify

log = logging.getLogger(__name__)

PROGRAM_SCHEMA_NAME = "braket.ir.openqasm.program"
RESULT_SCHEMA = {"name": "braket.task_result.gate_model_task_result", "version": "1"}

_WAITING = (BraketTaskStatus.CREATED, BraketTaskStatus.QUEUED)
_TASK_PATH = re.compile(r"^/quantum-task/(?P<arn>[^/]+)(?P<cancel>/cancel)?$")
_DEVICE_PATH = re.compile(r"^/device/(?P<arn>[^/]+)$")


class MockConfigError(ValueError):
    pass


class _HttpError(Exception):
    def __init__(self, status: int, code: str, message: str) -> None:
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class MockDeviceEntry:
    """A catalog device. ``queue_depth`` is load from other tenants, added to live tasks."""

    arn: str
    name: str
    status: BraketDeviceStatus = BraketDeviceStatus.ONLINE
    qubit_count: int = 5
    queue_depth: int = 0
    native_gates: list[str] = field(default_factory=lambda: list(qasm.GATES))
    site_metrics: dict[int, dict[str, float]] = field(default_factory=dict)
    operation_metrics: dict[str, dict[str, Any]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.status = BraketDeviceStatus(self.status)
        self.site_metrics = {int(k): dict(v) for k, v in self.site_metrics.items()}
        if self.qubit_count < 1 or self.queue_depth < 0:
            raise MockConfigError(f"{self.arn}: qubit_count must be >= 1 and queue_depth >= 0")
        unknown = set(self.native_gates) - set(qasm.GATES)
        if unknown:
            raise MockConfigError(f"{self.arn}: unknown native gates {sorted(unknown)}")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> MockDeviceEntry:
        return cls(**data)


@dataclass(frozen=True)
class Latencies:
    """Virtual-time delays of the default transition script, in seconds."""

    created_to_queued: float = 1.0
    queued_per_slot: float = 2.0
    running: float = 3.0
    cancel: float = 1.0


@dataclass
class MockTaskRecord:
    task_id: str
    arn: str
    seq: int
    device_arn: str
    program: str
    measured_qubits: list[int]
    shots: int
    bucket: str
    key_prefix: str
    client_token: str
    created_at: float
    status: BraketTaskStatus = BraketTaskStatus.CREATED
    transition_script: list[tuple[float, BraketTaskStatus]] = field(default_factory=list)
    history: list[tuple[float, BraketTaskStatus]] = field(default_factory=list)
    reservation_arn: str | None = None

    @property
    def output_directory(self) -> str:
        return f"{self.key_prefix}/{self.task_id}" if self.key_prefix else self.task_id


def _json_response(status: int, payload: Any) -> HttpResponse:
    return HttpResponse(status, {"content-type": "application/json"}, json.dumps(payload).encode("utf-8"))


class MockCloud:
    def __init__(
        self,
        catalog: Iterable[MockDeviceEntry],
        *,
        seed: int = 0,
        latencies: Latencies = Latencies(),
        auth: Mapping[str, str] | Iterable[tuple[str, str]] = (("AKIDMOCK", "mock-secret"),),
        clock: VirtualClock | None = None,
        region: str = "us-east-1",
        account: str = "123456789012",
    ) -> None:
        self.devices: dict[str, MockDeviceEntry] = {}
        for entry in catalog:
            if entry.arn in self.devices:
                raise MockConfigError(f"duplicate device ARN {entry.arn}")
            self.devices[entry.arn] = entry
        if not self.devices:
            raise MockConfigError("catalog must contain at least one device")
        self.seed = seed
        self.latencies = latencies
        self.secrets = dict(auth.items() if isinstance(auth, Mapping) else auth)
        self.clock = clock or VirtualClock(ClockMode.MANUAL)
        self.region = region
        self.account = account
        self.tasks: dict[str, MockTaskRecord] = {}
        self.objects: dict[tuple[str, str], bytes] = {}
        self.request_counts: Counter[str] = Counter()
        self.request_log: list[tuple[str, str, int]] = []
        self._ids = random.Random(seed)
        self._by_token: dict[str, str] = {}
        # tasks with transitions still to apply, so advancing skips settled tasks
        self._pending: dict[str, MockTaskRecord] = {}
        self._next_overrides: list[dict[str, Any]] = []
        self._lock = threading.RLock()

    # test hooks

    def script_next_task(self, script: list[tuple[float, str]] | None = None, fail: str | None = None) -> None:
        """In-process equivalent of the x-mock-script / x-mock-fail headers for the next creation."""
        with self._lock:
            self._next_overrides.append({"script": script, "fail": fail})

    def advance(self, seconds: float) -> float:
        """Move virtual time forward and apply every transition that falls due, in time order."""
        with self._lock:
            now = self.clock.advance(seconds)
            self._apply_due(now)
            return now

    def sleep(self, seconds: float) -> None:
        """Client-side sleep that advances virtual time instead of blocking."""
        self.advance(seconds)

    def now(self) -> float:
        return self.clock.now()

    def total_requests(self, exclude_hooks: bool = True) -> int:
        return sum(n for op, n in self.request_counts.items() if not (exclude_hooks and op.startswith("_")))

    def queue_position(self, task: MockTaskRecord) -> int | None:
        if task.status not in _WAITING:
            return None
        return sum(
            1
            for other in self.tasks.values()
            if other.device_arn == task.device_arn and other.seq < task.seq and other.status in _WAITING
        )

    def queue_depth(self, device: MockDeviceEntry) -> int:
        live = sum(1 for t in self.tasks.values() if t.device_arn == device.arn and t.status in _WAITING)
        return device.queue_depth + live

    def put_object(self, bucket: str, key: str, data: bytes) -> None:
        with self._lock:
            self.objects[(bucket, key)] = data

    def serve(self, host: str = "127.0.0.1", port: int = 0):
        from .server import MockServer

        return MockServer(self, host, port)

    # transport entry points

    def __call__(self, request: HttpRequest) -> HttpResponse:
        parts = urlsplit(request.url)
        target = parts.path + (f"?{parts.query}" if parts.query else "")
        return self.handle(request.method, target, request.headers, request.body)

    def handle(self, method: str, target: str, headers: Mapping[str, str], body: bytes) -> HttpResponse:
        with self._lock:
            self._apply_due(self.clock.now())
            op, handler, args = self._route(method, target)
            self.request_counts[op] += 1
            try:
                if not op.startswith("_"):
                    try:
                        identity = verify(method, target, headers, body, self.secrets)
                    except SignatureError as exc:
                        raise _HttpError(403, "AccessDeniedException", str(exc)) from None
                    expected = "s3" if op == "GetObject" else "braket"
                    if identity.service != expected:
                        raise _HttpError(403, "AccessDeniedException", f"credential scope is not {expected}")
                resp = handler(headers, body, *args)
            except _HttpError as err:
                resp = _json_response(err.status, {"code": err.code, "message": err.message})
            self.request_log.append((op, target, resp.status))
            return resp

    def _route(self, method: str, target: str):
        path = target.partition("?")[0]
        if path.startswith("/_mock/"):
            if method == "POST" and path == "/_mock/advance":
                return "_advance", self._hook_advance, ()
            if method == "GET" and path == "/_mock/tasks":
                return "_tasks", self._hook_tasks, ()
            return "_unknown", self._not_found, ()
        if method == "POST" and path == "/quantum-task":
            return "CreateQuantumTask", self._create_task, ()
        m = _TASK_PATH.match(path)
        if m and method == "GET" and not m["cancel"]:
            return "GetQuantumTask", self._get_task, (unquote(m["arn"]),)
        if m and method == "PUT" and m["cancel"]:
            return "CancelQuantumTask", self._cancel_task, (unquote(m["arn"]),)
        m = _DEVICE_PATH.match(path)
        if m and method == "GET":
            return "GetDevice", self._get_device, (unquote(m["arn"]),)
        if method == "GET" and path.count("/") >= 2:
            bucket, _, key = path[1:].partition("/")
            return "GetObject", self._get_object, (unquote(bucket), unquote(key))
        return "Unknown", self._not_found, ()

    # handlers

    def _not_found(self, headers, body) -> HttpResponse:
        raise _HttpError(404, "UnknownOperationException", "no such endpoint")

    def _hook_advance(self, headers, body) -> HttpResponse:
        try:
            seconds = float(json.loads(body or b"{}").get("seconds", 0))
            now = self.advance(seconds)
        except (ValueError, AttributeError, RuntimeError) as exc:
            raise _HttpError(400, "ValidationException", str(exc)) from None
        return _json_response(200, {"now": now})

    def _hook_tasks(self, headers, body) -> HttpResponse:
        return _json_response(
            200,
            [
                {
                    "quantumTaskArn": t.arn,
                    "status": t.status.value,
                    "deviceArn": t.device_arn,
                    "shots": t.shots,
                    "createdAt": t.created_at,
                    "queuePosition": self.queue_position(t),
                    "history": [[when, s.value] for when, s in t.history],
                }
                for t in sorted(self.tasks.values(), key=lambda t: t.seq)
            ],
        )

    def _create_task(self, headers, body) -> HttpResponse:
        try:
            req = json.loads(body)
        except (ValueError, UnicodeDecodeError):
            raise _HttpError(400, "ValidationException", "request body is not JSON") from None
        if not isinstance(req, dict):
            raise _HttpError(400, "ValidationException", "request body must be an object")
        for name, kind in (
            ("action", str),
            ("clientToken", str),
            ("deviceArn", str),
            ("outputS3Bucket", str),
            ("outputS3KeyPrefix", str),
            ("shots", int),
        ):
            if not isinstance(req.get(name), kind) or isinstance(req.get(name), bool):
                raise _HttpError(400, "ValidationException", f"{name} is missing or has the wrong type")
        existing = self._by_token.get(req["clientToken"])
        if existing is not None:
            task = self.tasks[existing]
            return _json_response(201, {"quantumTaskArn": task.arn, "status": task.status.value})
        if req["shots"] < 1:
            raise _HttpError(400, "ValidationException", "shots must be at least 1")
        if not req["outputS3Bucket"]:
            raise _HttpError(400, "ValidationException", "outputS3Bucket must be non-empty")
        device = self.devices.get(req["deviceArn"])
        if device is None:
            raise _HttpError(404, "ResourceNotFoundException", f"unknown device {req['deviceArn']}")
        if device.status is not BraketDeviceStatus.ONLINE:
            raise _HttpError(424, "DeviceOfflineException", f"device is {device.status.value}")
        program = self._parse_action(req["action"])
        params = req.get("deviceParameters") or {}
        verbatim = params.get("verbatim", True) if isinstance(params, dict) else True
        allowed = device.native_gates if verbatim else qasm.GATES
        violations = qasm.validate(program, device.qubit_count, allowed)
        if violations:
            raise _HttpError(400, "ValidationException", "; ".join(v.message for v in violations))
        reservation = None
        for assoc in req.get("associations") or []:
            if not isinstance(assoc, dict) or not isinstance(assoc.get("arn"), str):
                raise _HttpError(400, "ValidationException", "malformed association")
            reservation = assoc["arn"]

        overrides = self._next_overrides.pop(0) if self._next_overrides else {}
        script_text = _header(headers, "x-mock-script")
        fail = _header(headers, "x-mock-fail") or overrides.get("fail")
        now = self.clock.now()
        if script_text is not None:
            script = self._parse_script(script_text, now)
        elif overrides.get("script") is not None:
            script = self._parse_script(json.dumps(overrides["script"]), now)
        else:
            script = self._default_script(device, now)
        if fail is not None:
            if fail not in ("FAILED", "NOT_SET"):
                raise _HttpError(400, "ValidationException", "x-mock-fail must be FAILED or NOT_SET")
            when = script[-1][0] if script else now
            script = [entry for entry in script[:-1]] + [(when, BraketTaskStatus(fail))]

        task_id = str(uuid.UUID(int=self._ids.getrandbits(128), version=4))
        task = MockTaskRecord(
            task_id=task_id,
            arn=f"arn:aws:braket:{self.region}:{self.account}:quantum-task/{task_id}",
            seq=len(self.tasks),
            device_arn=device.arn,
            program=json.loads(req["action"])["source"],
            measured_qubits=program.measured_qubits,
            shots=req["shots"],
            bucket=req["outputS3Bucket"],
            key_prefix=req["outputS3KeyPrefix"],
            client_token=req["clientToken"],
            created_at=now,
            transition_script=script,
            history=[(now, BraketTaskStatus.CREATED)],
            reservation_arn=reservation,
        )
        self.tasks[task.arn] = task
        self._pending[task.arn] = task
        self._by_token[task.client_token] = task.arn
        self._apply_due(now)
        return _json_response(201, {"quantumTaskArn": task.arn, "status": task.status.value})

    def _parse_action(self, action: str) -> qasm.Program:
        try:
            doc = json.loads(action)
        except ValueError:
            raise _HttpError(400, "ValidationException", "action is not JSON") from None
        header = doc.get("braketSchemaHeader") if isinstance(doc, dict) else None
        if not isinstance(header, dict) or header.get("name") != PROGRAM_SCHEMA_NAME:
            raise _HttpError(400, "ValidationException", "action must be an OpenQASM program")
        if not isinstance(doc.get("source"), str):
            raise _HttpError(400, "ValidationException", "action.source must be a string")
        try:
            program = qasm.parse(doc["source"])
        except qasm.QasmError as exc:
            raise _HttpError(400, "ValidationException", f"program rejected: {exc}") from None
        if program.num_qubits > qasm.MAX_QUBITS:
            raise _HttpError(400, "ValidationException", f"at most {qasm.MAX_QUBITS} qubits are supported")
        return program

    def _default_script(self, device: MockDeviceEntry, now: float) -> list[tuple[float, BraketTaskStatus]]:
        lat = self.latencies
        ahead = sum(1 for t in self.tasks.values() if t.device_arn == device.arn and t.status in _WAITING)
        queued = now + lat.created_to_queued
        running = queued + lat.queued_per_slot * (ahead + 1)
        return [
            (queued, BraketTaskStatus.QUEUED),
            (running, BraketTaskStatus.RUNNING),
            (running + lat.running, BraketTaskStatus.COMPLETED),
        ]

    @staticmethod
    def _parse_script(text: str, now: float) -> list[tuple[float, BraketTaskStatus]]:
        try:
            entries = json.loads(text)
            script = [(now + float(offset), BraketTaskStatus(status)) for offset, status in entries]
        except (ValueError, TypeError):
            raise _HttpError(400, "ValidationException", "x-mock-script must be [[seconds, STATUS], ...]") from None
        if any(b[0] < a[0] for a, b in zip(script, script[1:])) or any(t < now for t, _ in script):
            raise _HttpError(400, "ValidationException", "x-mock-script times must be non-decreasing")
        return script

    def _task(self, arn: str) -> MockTaskRecord:
        task = self.tasks.get(arn)
        if task is None:
            raise _HttpError(404, "ResourceNotFoundException", f"unknown quantum task {arn}")
        return task

    def _get_task(self, headers, body, arn: str) -> HttpResponse:
        task = self._task(arn)
        payload: dict[str, Any] = {
            "quantumTaskArn": task.arn,
            "status": task.status.value,
            "deviceArn": task.device_arn,
            "shots": task.shots,
            "outputS3Bucket": task.bucket,
            "outputS3Directory": task.output_directory,
        }
        position = self.queue_position(task)
        if position is not None:
            payload["queueInfo"] = {"position": position}
        return _json_response(200, payload)

    def _cancel_task(self, headers, body, arn: str) -> HttpResponse:
        task = self._task(arn)
        if task.status.is_terminal:
            raise _HttpError(409, "ConflictException", f"task already {task.status.value}")
        now = self.clock.now()
        if task.status is not BraketTaskStatus.CANCELLING:
            self._transition(task, BraketTaskStatus.CANCELLING, now)
            task.transition_script = [(now + self.latencies.cancel, BraketTaskStatus.CANCELLED)]
            self._pending[task.arn] = task
            self._apply_due(now)
        return _json_response(200, {"cancellationStatus": task.status.value, "quantumTaskArn": task.arn})

    def _get_device(self, headers, body, arn: str) -> HttpResponse:
        device = self.devices.get(arn)
        if device is None:
            raise _HttpError(404, "ResourceNotFoundException", f"unknown device {arn}")
        capabilities = {
            "qubitCount": device.qubit_count,
            "nativeGateSet": list(device.native_gates),
            "siteMetrics": {str(site): metrics for site, metrics in sorted(device.site_metrics.items())},
            "operationMetrics": device.operation_metrics,
        }
        return _json_response(
            200,
            {
                "deviceArn": device.arn,
                "deviceName": device.name,
                "deviceStatus": device.status.value,
                "deviceCapabilities": json.dumps(capabilities),
                "queueDepth": self.queue_depth(device),
            },
        )

    def _get_object(self, headers, body, bucket: str, key: str) -> HttpResponse:
        data = self.objects.get((bucket, key))
        if data is None:
            raise _HttpError(404, "NoSuchKey", f"s3://{bucket}/{key} does not exist")
        return HttpResponse(200, {"content-type": "application/json"}, data)

    # state machine

    def _apply_due(self, now: float) -> None:
        due = [
            (when, task.seq, task, status)
            for task in self._pending.values()
            for when, status in task.transition_script
            if when <= now
        ]
        for when, _, task, status in sorted(due, key=lambda d: (d[0], d[1])):
            task.transition_script.pop(0)
            self._transition(task, status, when)
        for task in {id(d[2]): d[2] for d in due}.values():
            if not task.transition_script:
                self._pending.pop(task.arn, None)

    def _transition(self, task: MockTaskRecord, status: BraketTaskStatus, when: float) -> None:
        task.status = status
        task.history.append((when, status))
        if status is BraketTaskStatus.COMPLETED:
            self._execute(task)

    def _execute(self, task: MockTaskRecord) -> None:
        program = qasm.parse(task.program)
        state = qasm.simulate(program)
        seed = int(np.random.SeedSequence([self.seed, task.seq]).generate_state(1)[0])
        rows = qasm.sample_measurements(state, task.measured_qubits, task.shots, seed)
        document = {
            "braketSchemaHeader": RESULT_SCHEMA,
            "measurements": rows,
            "measuredQubits": task.measured_qubits,
            "taskMetadata": {"id": task.arn, "shots": task.shots, "deviceId": task.device_arn},
        }
        key = f"{task.output_directory}/results.json"
        self.objects[(task.bucket, key)] = json.dumps(document).encode("utf-8")
        log.debug("task %s completed; wrote s3://%s/%s", task.task_id, task.bucket, key)


def _header(headers: Mapping[str, str], name: str) -> str | None:
    for key, value in headers.items():
        if key.lower() == name:
            return value
    return None


def start(
    catalog: Iterable[MockDeviceEntry],
    seed: int = 0,
    latencies: Latencies = Latencies(),
    auth: Mapping[str, str] | Iterable[tuple[str, str]] = (("AKIDMOCK", "mock-secret"),),
    *,
    clock_mode: ClockMode = ClockMode.MANUAL,
    port: int | None = None,
    host: str = "127.0.0.1",
):
    """Build a mock service; with ``port`` set, also start serving it over HTTP.

    Returns the :class:`MockCloud`, or ``(cloud, server)`` when serving.
    """
    cloud = MockCloud(catalog, seed=seed, latencies=latencies, auth=auth, clock=VirtualClock(clock_mode))
    if port is None:
        return cloud
    return cloud, cloud.serve(host, port)
