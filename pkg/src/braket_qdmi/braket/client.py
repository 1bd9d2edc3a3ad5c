"""Signed REST clients for the quantum-task API and the result object store."""

from __future__ import annotations

import datetime as dt
import json
import logging
import random
import time
import uuid
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from typing import Any, NamedTuple
from urllib.parse import quote

from braket_qdmi.errors import (
    ConflictError,
    DeviceUnavailableError,
    FatalError,
    InvalidArgumentError,
    NotFoundError,
    PermissionDeniedError,
    TransportError,
)

from .arn import DeviceArn
from .credentials import Credentials
from .http import HttpRequest, HttpResponse, Transport, UrllibTransport
from .sigv4 import sign_request
from .status import BraketDeviceStatus, BraketTaskStatus

log = logging.getLogger(__name__)

PROGRAM_SCHEMA = {"name": "braket.ir.openqasm.program", "version": "1"}
RESULT_SCHEMA = {"name": "braket.task_result.gate_model_task_result", "version": "1"}
RESULT_FILENAME = "results.json"


def default_endpoint(service: str, region: str, partition: str = "aws") -> str:
    suffix = "amazonaws.com.cn" if partition == "aws-cn" else "amazonaws.com"
    return f"https://{service}.{region}.{suffix}"


@dataclass(frozen=True)
class RetryPolicy:
    """Retry transport errors and 5xx responses with jittered exponential backoff."""

    max_attempts: int = 3
    base_delay: float = 0.2
    factor: float = 2.0

    def delay(self, attempt: int, rng: random.Random) -> float:
        # attempt is 1-based; full delay scaled into [0.5, 1.0)
        return self.base_delay * self.factor ** (attempt - 1) * (0.5 + rng.random() / 2)


@dataclass(frozen=True)
class TaskDetail:
    task_id: str
    status: BraketTaskStatus
    queue_position: int | None
    output_bucket: str
    output_key_prefix: str
    device_arn: str = ""
    shots: int = 0


class CreatedTask(NamedTuple):
    task_id: str
    status: BraketTaskStatus


@dataclass(frozen=True)
class OperationMetrics:
    arity: int
    default: Mapping[str, float] = field(default_factory=dict)
    sites: Mapping[tuple[int, ...], Mapping[str, float]] = field(default_factory=dict)


@dataclass(frozen=True)
class DeviceDetail:
    arn: str
    name: str
    status: BraketDeviceStatus
    qubit_count: int
    queue_depth: int
    native_gates: tuple[str, ...] = ()
    site_metrics: Mapping[int, Mapping[str, float]] = field(default_factory=dict)
    operation_metrics: Mapping[str, OperationMetrics] = field(default_factory=dict)


def _error_message(resp: HttpResponse) -> str:
    try:
        payload = json.loads(resp.body)
        return str(payload.get("message", payload))
    except (ValueError, AttributeError):
        return resp.body[:200].decode("utf-8", "replace")


def raise_for_status(resp: HttpResponse, what: str) -> None:
    if resp.status < 300:
        return
    message = f"{what}: HTTP {resp.status}: {_error_message(resp)}"
    if resp.status == 400:
        raise InvalidArgumentError(message)
    if resp.status in (401, 403):
        raise PermissionDeniedError(message)
    if resp.status == 404:
        raise NotFoundError(message)
    if resp.status == 409:
        raise ConflictError(message)
    if resp.status == 424:
        raise DeviceUnavailableError(message)
    raise FatalError(message)


class SignedClient:
    """Shared request path: sign, send, retry transient failures, map HTTP errors."""

    service = ""

    def __init__(
        self,
        endpoint: str,
        region: str,
        credentials: Credentials,
        transport: Transport | None = None,
        *,
        retry: RetryPolicy = RetryPolicy(),
        sleep: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
        now: Callable[[], dt.datetime] | None = None,
    ) -> None:
        self.endpoint = endpoint.rstrip("/")
        self.region = region
        self.credentials = credentials
        self.transport = transport or UrllibTransport()
        self.retry = retry
        self._sleep = sleep
        self._rng = rng or random.Random()
        self._now = now or (lambda: dt.datetime.now(dt.timezone.utc))

    def _send(
        self, method: str, path: str, body: bytes = b"", headers: Mapping[str, str] | None = None
    ) -> HttpResponse:
        base_headers = dict(headers or {})
        if body:
            base_headers.setdefault("content-type", "application/json")
        last_error: Exception | None = None
        for attempt in range(1, self.retry.max_attempts + 1):
            request = sign_request(
                self.credentials,
                HttpRequest(method, self.endpoint + path, dict(base_headers), body),
                self.region,
                self.service,
                self._now(),
            )
            try:
                resp = self.transport(request)
            except TransportError as exc:
                last_error = exc
            else:
                if resp.status < 500:
                    return resp
                last_error = FatalError(f"{method} {path}: HTTP {resp.status}: {_error_message(resp)}")
            if attempt < self.retry.max_attempts:
                delay = self.retry.delay(attempt, self._rng)
                log.debug("retrying %s %s in %.3fs after %s", method, path, delay, last_error)
                self._sleep(delay)
        raise TransportError(f"{method} {path} failed after {self.retry.max_attempts} attempts: {last_error}")

    @staticmethod
    def _json(resp: HttpResponse, what: str) -> dict[str, Any]:
        try:
            payload = json.loads(resp.body)
        except (ValueError, UnicodeDecodeError) as exc:
            raise FatalError(f"{what}: response is not JSON") from exc
        if not isinstance(payload, dict):
            raise FatalError(f"{what}: response is not a JSON object")
        return payload


class BraketClient(SignedClient):
    service = "braket"

    def create_quantum_task(
        self,
        arn: DeviceArn | str,
        program: str,
        shots: int,
        bucket: str,
        key_prefix: str,
        reservation_arn: str | None = None,
        client_token: str | None = None,
        *,
        verbatim: bool = True,
        extra_headers: Mapping[str, str] | None = None,
    ) -> CreatedTask:
        """Create a task; retried attempts reuse ``client_token`` so the service creates it once."""
        body: dict[str, Any] = {
            "action": json.dumps({"braketSchemaHeader": PROGRAM_SCHEMA, "source": program}),
            "clientToken": client_token or str(uuid.UUID(int=self._rng.getrandbits(128), version=4)),
            "deviceArn": str(arn),
            "deviceParameters": {"verbatim": verbatim},
            "outputS3Bucket": bucket,
            "outputS3KeyPrefix": key_prefix,
            "shots": shots,
        }
        if reservation_arn:
            body["associations"] = [{"arn": reservation_arn, "type": "RESERVATION_TIME_WINDOW_ARN"}]
        resp = self._send("POST", "/quantum-task", json.dumps(body).encode("utf-8"), extra_headers)
        raise_for_status(resp, "CreateQuantumTask")
        payload = self._json(resp, "CreateQuantumTask")
        task_id = payload.get("quantumTaskArn")
        if not isinstance(task_id, str) or not task_id:
            raise FatalError("CreateQuantumTask: response lacks quantumTaskArn")
        return CreatedTask(task_id, BraketTaskStatus.parse(payload.get("status")))

    def get_quantum_task(self, task_id: str) -> TaskDetail:
        if not task_id:
            raise InvalidArgumentError("task id must be non-empty")
        resp = self._send("GET", f"/quantum-task/{quote(task_id, safe='')}")
        raise_for_status(resp, "GetQuantumTask")
        payload = self._json(resp, "GetQuantumTask")
        try:
            queue_info = payload.get("queueInfo") or {}
            position = queue_info.get("position")
            return TaskDetail(
                task_id=str(payload["quantumTaskArn"]),
                status=BraketTaskStatus.parse(payload.get("status")),
                queue_position=None if position is None else int(position),
                output_bucket=str(payload.get("outputS3Bucket", "")),
                output_key_prefix=str(payload.get("outputS3Directory", "")),
                device_arn=str(payload.get("deviceArn", "")),
                shots=int(payload.get("shots", 0)),
            )
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise FatalError(f"GetQuantumTask: malformed response: {exc}") from exc

    def cancel_quantum_task(self, task_id: str, client_token: str | None = None) -> BraketTaskStatus:
        body = json.dumps({"clientToken": client_token or str(uuid.UUID(int=self._rng.getrandbits(128)))})
        resp = self._send("PUT", f"/quantum-task/{quote(task_id, safe='')}/cancel", body.encode("utf-8"))
        raise_for_status(resp, "CancelQuantumTask")
        return BraketTaskStatus.parse(self._json(resp, "CancelQuantumTask").get("cancellationStatus"))

    def get_device(self, arn: DeviceArn | str) -> DeviceDetail:
        resp = self._send("GET", f"/device/{quote(str(arn), safe='')}")
        raise_for_status(resp, "GetDevice")
        payload = self._json(resp, "GetDevice")
        try:
            caps = json.loads(payload["deviceCapabilities"])
            ops = {
                name: OperationMetrics(
                    arity=int(entry["arity"]),
                    default={k: float(v) for k, v in entry.get("metrics", {}).items()},
                    sites={
                        tuple(int(i) for i in key.split(",")): {k: float(v) for k, v in metrics.items()}
                        for key, metrics in entry.get("sites", {}).items()
                    },
                )
                for name, entry in caps.get("operationMetrics", {}).items()
            }
            return DeviceDetail(
                arn=str(payload["deviceArn"]),
                name=str(payload["deviceName"]),
                status=BraketDeviceStatus.parse(payload.get("deviceStatus")),
                qubit_count=int(caps["qubitCount"]),
                queue_depth=int(payload.get("queueDepth", 0)),
                native_gates=tuple(caps.get("nativeGateSet", ())),
                site_metrics={
                    int(site): {k: float(v) for k, v in metrics.items()}
                    for site, metrics in caps.get("siteMetrics", {}).items()
                },
                operation_metrics=ops,
            )
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise FatalError(f"GetDevice: malformed response: {exc}") from exc


class ObjectStoreClient(SignedClient):
    service = "s3"

    def get_object(self, bucket: str, key: str) -> bytes:
        if not bucket or not key:
            raise InvalidArgumentError("bucket and key must be non-empty")
        resp = self._send("GET", f"/{quote(bucket, safe='')}/{quote(key, safe='/')}")
        raise_for_status(resp, "GetObject")
        return resp.body


def result_key(output_directory: str) -> str:
    return f"{output_directory.rstrip('/')}/{RESULT_FILENAME}"
