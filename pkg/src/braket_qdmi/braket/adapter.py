"""Session-scoped binding of the device interface onto the quantum-task API."""

from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

from braket_qdmi.enums import DeviceStatus, JobStatus, SessionParameter
from braket_qdmi.errors import FatalError, InvalidArgumentError

from .arn import DeviceArn, parse_device_arn, resolve_region
from .client import BraketClient, DeviceDetail, ObjectStoreClient, default_endpoint, result_key
from .credentials import Credentials, load_credentials
from .results import ResultHistogram, parse_result_document
from .status import DEFAULT_QUEUE_THRESHOLD, map_device_status, map_task_status

if TYPE_CHECKING:
    from braket_qdmi.device.runtime import Runtime

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubmitRequest:
    program: str
    shots: int
    bucket: str
    key_prefix: str
    reservation_arn: str | None
    client_token: str


@dataclass(frozen=True)
class TaskSnapshot:
    status: JobStatus
    queue_position: int | None
    output_bucket: str
    output_directory: str


class BraketBackend:
    """Clients, target ARN and queue threshold for one initialized session."""

    def __init__(
        self,
        arn: DeviceArn,
        region: str,
        credentials: Credentials,
        braket: BraketClient,
        object_store: ObjectStoreClient,
        queue_threshold: int = DEFAULT_QUEUE_THRESHOLD,
    ) -> None:
        self.arn = arn
        self.region = region
        self.credentials = credentials
        self.braket = braket
        self.object_store = object_store
        self.queue_threshold = queue_threshold

    @property
    def cache_key(self) -> tuple[str, str]:
        return (self.braket.endpoint, self.arn.raw)

    def device_detail(self) -> DeviceDetail:
        return self.braket.get_device(self.arn)

    def device_status(self, detail: DeviceDetail) -> DeviceStatus:
        return map_device_status(detail.status, detail.queue_depth, self.queue_threshold)

    def submit(self, req: SubmitRequest) -> tuple[str, JobStatus]:
        created = self.braket.create_quantum_task(
            self.arn,
            req.program,
            req.shots,
            req.bucket,
            req.key_prefix,
            req.reservation_arn,
            req.client_token,
        )
        return created.task_id, map_task_status(created.status)

    def check(self, task_id: str) -> TaskSnapshot:
        detail = self.braket.get_quantum_task(task_id)
        return TaskSnapshot(
            status=map_task_status(detail.status),
            queue_position=detail.queue_position,
            output_bucket=detail.output_bucket,
            output_directory=detail.output_key_prefix,
        )

    def cancel(self, task_id: str) -> None:
        self.braket.cancel_quantum_task(task_id)

    def results(self, snapshot: TaskSnapshot) -> ResultHistogram:
        if not snapshot.output_bucket or not snapshot.output_directory:
            raise FatalError("task reports no output location")
        data = self.object_store.get_object(snapshot.output_bucket, result_key(snapshot.output_directory))
        return parse_result_document(data)


def _positive_int(value: Any, name: str) -> int:
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise InvalidArgumentError(f"{name} must be an integer") from None
    if number < 1:
        raise InvalidArgumentError(f"{name} must be at least 1")
    return number


def connect(params: Mapping[SessionParameter, Any], runtime: Runtime) -> BraketBackend:
    """Validate session parameters and build the session's clients.

    Makes no network calls: failures here are configuration errors only.
    """
    text = params.get(SessionParameter.DEVICE_ARN)
    if not text:
        raise InvalidArgumentError("DEVICE_ARN must be set before session init")
    arn = parse_device_arn(text)
    region = resolve_region(
        arn, params.get(SessionParameter.DEFAULT_REGION), runtime.environ.get("AWS_DEFAULT_REGION")
    )
    credentials = load_credentials(
        params.get(SessionParameter.ACCESS_KEY_ID),
        params.get(SessionParameter.SECRET_ACCESS_KEY),
        params.get(SessionParameter.SESSION_TOKEN),
        params.get(SessionParameter.CREDENTIALS_FILE_PATH),
        params.get(SessionParameter.PROFILE_NAME),
        environ=runtime.environ,
    )
    threshold = DEFAULT_QUEUE_THRESHOLD
    if SessionParameter.CUSTOM_QUEUE_THRESHOLD in params:
        threshold = _positive_int(params[SessionParameter.CUSTOM_QUEUE_THRESHOLD], "CUSTOM_QUEUE_THRESHOLD")

    common = dict(
        transport=runtime.transport,
        retry=runtime.retry,
        sleep=runtime.sleep,
        rng=runtime.spawn_rng(),
        now=runtime.now,
    )
    braket = BraketClient(
        params.get(SessionParameter.CUSTOM_ENDPOINT_BRAKET) or default_endpoint("braket", region, arn.partition),
        region,
        credentials,
        **common,
    )
    store = ObjectStoreClient(
        params.get(SessionParameter.CUSTOM_ENDPOINT_OBJECT_STORE) or default_endpoint("s3", region, arn.partition),
        region,
        credentials,
        **common,
    )
    log.debug("session bound to %s in %s (%s credentials)", arn.raw, region, credentials.source.value)
    return BraketBackend(arn, region, credentials, braket, store, threshold)
