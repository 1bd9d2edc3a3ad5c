"""Device, session and job lifecycles.

Every public function returns a :class:`StatusCode` (first element of a tuple
when it also produces values). Functions validate before they mutate, so a
failed call leaves observable state unchanged; an ``ERROR_FATAL`` result
poisons the handle it was called on, and every later call on that handle
except the free function reports ``ERROR_BAD_STATE``.
"""

from __future__ import annotations

import functools
import itertools
import logging
import threading
import uuid
from collections.abc import Sequence
from enum import Enum
from typing import Any
from urllib.parse import urlsplit

from braket_qdmi import __version__
from braket_qdmi import qasm
from braket_qdmi.braket.adapter import SubmitRequest, TaskSnapshot
from braket_qdmi.braket.client import DeviceDetail
from braket_qdmi.braket.results import ResultHistogram
from braket_qdmi.enums import (
    PROGRAM_FORMAT_OPENQASM3,
    DeviceProperty,
    JobParameter,
    JobStatus,
    OperationProperty,
    SessionParameter,
    SiteProperty,
)
from braket_qdmi.errors import (
    BadStateError,
    DeadlineExceededError,
    FatalError,
    InvalidArgumentError,
    NotFoundError,
    NotSupportedError,
    QDMIError,
    StatusCode,
)

from .runtime import Runtime

log = logging.getLogger(__name__)

DEFAULT_KEY_PREFIX = "results"

_STRING_SESSION_PARAMS = frozenset(SessionParameter) - {SessionParameter.CUSTOM_QUEUE_THRESHOLD}
_ENDPOINT_PARAMS = frozenset(
    {SessionParameter.CUSTOM_ENDPOINT_BRAKET, SessionParameter.CUSTOM_ENDPOINT_OBJECT_STORE}
)


class SessionState(Enum):
    ALLOCATED = "allocated"
    INITIALIZED = "initialized"
    FREED = "freed"


class JobState(Enum):
    CONFIGURING = "configuring"
    SUBMITTED = "submitted"
    FREED = "freed"


class Session:
    """Opaque session handle."""

    def __init__(self, device: Device) -> None:
        self._device = device
        self.state = SessionState.ALLOCATED
        self.params: dict[SessionParameter, Any] = {}
        self.backend: Any = None
        self.region: str | None = None
        self.jobs: list[Job] = []
        self.poisoned = False
        self.last_error: Exception | None = None

    def snapshot(self) -> tuple:
        return (self.state, tuple(sorted(self.params.items())), self.backend is not None, self.poisoned)

    def __repr__(self) -> str:
        return f"<Session {self.state.value} at {id(self):#x}>"


class Job:
    """Opaque job handle."""

    def __init__(self, session: Session, local_id: int) -> None:
        self.session = session
        self.local_id = local_id
        self.state = JobState.CONFIGURING
        self.params: dict[JobParameter, Any] = {}
        self.program: qasm.Program | None = None
        self.remote_task_id: str | None = None
        self.cached_status: JobStatus | None = None
        self.queue_position: int | None = None
        self.task_snapshot: TaskSnapshot | None = None
        self.result_cache: ResultHistogram | None = None
        self.poisoned = False
        self.last_error: Exception | None = None

    def snapshot(self) -> tuple:
        return (
            self.state,
            tuple(sorted(self.params.items())),
            self.remote_task_id,
            self.cached_status,
            self.result_cache is not None,
            self.poisoned,
        )

    def __repr__(self) -> str:
        return f"<Job {self.local_id} {self.state.value}>"


class Device:
    """The process-wide device context."""

    def __init__(self, runtime: Runtime) -> None:
        self.runtime = runtime
        self.initialized = True
        self.sessions: set[Session] = set()
        self.metadata_cache: dict[tuple[str, str], tuple[DeviceDetail, float]] = {}
        self._job_ids = itertools.count(1)
        self._lock = threading.RLock()

    def next_job_id(self) -> int:
        with self._lock:
            return next(self._job_ids)

    def client_token(self) -> str:
        return str(uuid.UUID(int=self.runtime.spawn_rng().getrandbits(128), version=4))

    def device_detail(self, backend: Any, fresh: bool = False) -> DeviceDetail:
        key = backend.cache_key
        now = self.runtime.clock()
        with self._lock:
            cached = self.metadata_cache.get(key)
        if cached is not None and not fresh and now - cached[1] < self.runtime.metadata_ttl:
            return cached[0]
        detail = backend.device_detail()
        with self._lock:
            self.metadata_cache[key] = (detail, now)
        return detail


_device: Device | None = None
_device_lock = threading.Lock()
# incremented each time the process-wide runtime is brought up
runtime_setups = 0


def current_device() -> Device | None:
    return _device


def _fail(owner: Any, exc: Exception, status: StatusCode) -> None:
    if isinstance(owner, (Session, Job)):
        owner.last_error = exc
        if status is StatusCode.ERROR_FATAL:
            owner.poisoned = True


def _api(n_outputs: int = 0):
    """Convert raised errors into status codes at the public boundary."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            owner = args[0] if args else None
            try:
                result = fn(*args, **kwargs)
            except QDMIError as exc:
                status = exc.status
                log.debug("%s -> %s: %s", fn.__name__, status.name, exc)
                _fail(owner, exc, status)
            except Exception as exc:  # noqa: BLE001 - the boundary must never raise
                status = StatusCode.ERROR_FATAL
                log.exception("%s failed unexpectedly", fn.__name__)
                _fail(owner, exc, status)
            else:
                if n_outputs == 0:
                    return StatusCode.SUCCESS
                if n_outputs == 1:
                    return StatusCode.SUCCESS, result
                return (StatusCode.SUCCESS, *result)
            if n_outputs == 0:
                return status
            return (status,) + (None,) * n_outputs

        return wrapper

    return deco


def _session(session: Any, *states: SessionState) -> Session:
    if not isinstance(session, Session):
        raise InvalidArgumentError("not a session handle")
    if session.poisoned:
        raise BadStateError("session is unusable after a fatal error")
    if states and session.state not in states:
        raise BadStateError(f"session is {session.state.value}")
    return session


def _job(job: Any, *states: JobState) -> Job:
    if not isinstance(job, Job):
        raise InvalidArgumentError("not a job handle")
    if job.poisoned:
        raise BadStateError("job is unusable after a fatal error")
    if states and job.state not in states:
        raise BadStateError(f"job is {job.state.value}")
    return job


# device lifecycle


@_api()
def device_initialize(runtime: Runtime | None = None) -> None:
    """Create the device singleton; repeated calls while initialized are no-ops."""
    global _device, runtime_setups
    with _device_lock:
        if _device is not None:
            return
        runtime = runtime or Runtime()
        try:
            runtime.setup()
        except Exception as exc:
            raise FatalError(f"runtime setup failed: {exc}") from exc
        runtime_setups += 1
        _device = Device(runtime)


@_api()
def device_finalize() -> None:
    global _device
    with _device_lock:
        device = _device
        if device is None:
            raise BadStateError("device is not initialized")
        with device._lock:
            for session in list(device.sessions):
                _release_session(session)
            device.sessions.clear()
            device.metadata_cache.clear()
            device.initialized = False
        _device = None


def _require_device() -> Device:
    device = _device
    if device is None or not device.initialized:
        raise BadStateError("device is not initialized")
    return device


# session lifecycle


@_api(1)
def session_alloc() -> Session:
    device = _require_device()
    with device._lock:
        session = Session(device)
        device.sessions.add(session)
    return session


def _check_session_value(param: SessionParameter, value: Any) -> Any:
    if param in _STRING_SESSION_PARAMS:
        if not isinstance(value, str) or not value.strip():
            raise InvalidArgumentError(f"{param.name} must be a non-empty string")
        if param in _ENDPOINT_PARAMS:
            parts = urlsplit(value)
            if parts.scheme not in ("http", "https") or not parts.netloc:
                raise InvalidArgumentError(f"{param.name} must be an http(s) URL")
        return value
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise InvalidArgumentError(f"{param.name} must be a positive integer")
    return value


def _enum(enum_cls: type, value: Any):
    try:
        return enum_cls(value)
    except (ValueError, TypeError):
        raise NotSupportedError(f"unknown {enum_cls.__name__} {value!r}") from None


@_api()
def session_set_parameter(session: Session, param: SessionParameter | int, value: Any) -> None:
    session = _session(session, SessionState.ALLOCATED)
    param = _enum(SessionParameter, param)
    session.params[param] = _check_session_value(param, value)


@_api()
def session_init(session: Session) -> None:
    session = _session(session, SessionState.ALLOCATED)
    device = _require_device()
    backend = device.runtime.backend_factory(dict(session.params), device.runtime)
    session.backend = backend
    session.region = getattr(backend, "region", None)
    session.state = SessionState.INITIALIZED


def _release_session(session: Session) -> None:
    for job in session.jobs:
        job.state = JobState.FREED
    session.jobs.clear()
    session.state = SessionState.FREED
    session.backend = None


@_api()
def session_free(session: Session) -> None:
    if not isinstance(session, Session):
        raise InvalidArgumentError("not a session handle")
    if session.state is SessionState.FREED:
        raise BadStateError("session already freed")
    device = session._device
    with device._lock:
        _release_session(session)
        device.sessions.discard(session)


# property queries


def _detail(session: Session, fresh: bool = False) -> DeviceDetail:
    return session._device.device_detail(session.backend, fresh=fresh)


@_api(1)
def session_query_device_property(session: Session, prop: DeviceProperty | int) -> Any:
    session = _session(session, SessionState.INITIALIZED)
    prop = _enum(DeviceProperty, prop)
    if prop is DeviceProperty.VERSION:
        return __version__
    if prop in (DeviceProperty.STATUS, DeviceProperty.QUEUE_DEPTH):
        detail = _detail(session, fresh=True)
        if prop is DeviceProperty.STATUS:
            return session.backend.device_status(detail)
        return detail.queue_depth
    detail = _detail(session)
    if prop is DeviceProperty.NAME:
        return detail.name
    return detail.qubit_count


@_api(1)
def session_query_site_property(session: Session, site: int, prop: SiteProperty | int) -> float:
    session = _session(session, SessionState.INITIALIZED)
    prop = _enum(SiteProperty, prop)
    detail = _detail(session)
    if isinstance(site, bool) or not isinstance(site, int) or not 0 <= site < detail.qubit_count:
        raise NotFoundError(f"site {site!r} outside 0..{detail.qubit_count - 1}")
    value = detail.site_metrics.get(site, {}).get(prop.name)
    if value is None:
        raise NotSupportedError(f"device reports no {prop.name} for site {site}")
    return value


@_api(1)
def session_query_operation_property(
    session: Session, operation: str, sites: Sequence[int], prop: OperationProperty | int
) -> float:
    session = _session(session, SessionState.INITIALIZED)
    prop = _enum(OperationProperty, prop)
    detail = _detail(session)
    metrics = detail.operation_metrics.get(operation)
    if metrics is None and operation not in detail.native_gates:
        raise NotFoundError(f"operation {operation!r} is not offered by the device")
    if metrics is not None:
        arity = metrics.arity
    elif operation in qasm.GATES:
        arity = qasm.GATES[operation][0]
    else:
        raise NotSupportedError(f"no metrics for operation {operation!r}")
    sites = tuple(sites)
    if len(sites) != arity:
        raise InvalidArgumentError(f"{operation} acts on {arity} site(s), got {len(sites)}")
    if len(set(sites)) != len(sites):
        raise InvalidArgumentError("operation sites must be distinct")
    for site in sites:
        if isinstance(site, bool) or not isinstance(site, int) or not 0 <= site < detail.qubit_count:
            raise NotFoundError(f"site {site!r} outside 0..{detail.qubit_count - 1}")
    value = None
    if metrics is not None:
        value = metrics.sites.get(sites, {}).get(prop.name, metrics.default.get(prop.name))
    if value is None:
        raise NotSupportedError(f"device reports no {prop.name} for {operation}{list(sites)}")
    return value


# job lifecycle


@_api(1)
def session_create_device_job(session: Session) -> Job:
    session = _session(session, SessionState.INITIALIZED)
    job = Job(session, session._device.next_job_id())
    session.jobs.append(job)
    return job


@_api(1)
def session_attach_job(session: Session, task_id: str) -> Job:
    """Job handle for an existing remote task, already in the submitted state.

    Performs one status query so the handle starts with a known status.
    """
    session = _session(session, SessionState.INITIALIZED)
    if not isinstance(task_id, str) or not task_id:
        raise InvalidArgumentError("task id must be a non-empty string")
    snapshot = session.backend.check(task_id)
    job = Job(session, session._device.next_job_id())
    job.state = JobState.SUBMITTED
    job.remote_task_id = task_id
    _record_snapshot(job, snapshot)
    session.jobs.append(job)
    return job


def _check_job_value(param: JobParameter, value: Any) -> tuple[Any, qasm.Program | None]:
    if param is JobParameter.SHOTS:
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise InvalidArgumentError("SHOTS must be an integer >= 1")
        return value, None
    if not isinstance(value, str) or not value.strip():
        raise InvalidArgumentError(f"{param.name} must be a non-empty string")
    if param is JobParameter.PROGRAM:
        return value, qasm.parse(value)
    if param is JobParameter.PROGRAM_FORMAT and value.lower() != PROGRAM_FORMAT_OPENQASM3:
        raise NotSupportedError(f"program format {value!r} is not supported")
    return value, None


@_api()
def job_set_parameter(job: Job, param: JobParameter | int, value: Any) -> None:
    job = _job(job, JobState.CONFIGURING)
    param = _enum(JobParameter, param)
    value, program = _check_job_value(param, value)
    job.params[param] = value
    if program is not None:
        job.program = program


@_api()
def job_submit(job: Job) -> None:
    job = _job(job, JobState.CONFIGURING)
    session = _session(job.session, SessionState.INITIALIZED)
    missing = [
        p.name
        for p in (JobParameter.PROGRAM, JobParameter.SHOTS, JobParameter.CUSTOM_OUTPUT_BUCKET)
        if p not in job.params
    ]
    if missing:
        raise InvalidArgumentError(f"missing job parameters: {', '.join(missing)}")
    detail = _detail(session)
    if job.program.num_qubits > detail.qubit_count:
        raise InvalidArgumentError(
            f"program uses {job.program.num_qubits} qubits, device has {detail.qubit_count}"
        )
    request = SubmitRequest(
        program=job.params[JobParameter.PROGRAM],
        shots=job.params[JobParameter.SHOTS],
        bucket=job.params[JobParameter.CUSTOM_OUTPUT_BUCKET],
        key_prefix=job.params.get(JobParameter.CUSTOM_OUTPUT_KEY_PREFIX, DEFAULT_KEY_PREFIX),
        reservation_arn=job.params.get(JobParameter.CUSTOM_RESERVATION_ARN),
        client_token=session._device.client_token(),
    )
    task_id, status = session.backend.submit(request)
    job.remote_task_id = task_id
    job.cached_status = status
    job.state = JobState.SUBMITTED


def _record_snapshot(job: Job, snapshot: TaskSnapshot) -> None:
    job.cached_status = snapshot.status
    job.queue_position = snapshot.queue_position
    job.task_snapshot = snapshot


def _check(job: Job) -> tuple[JobStatus, int | None]:
    if job.cached_status is not None and job.cached_status.is_terminal:
        return job.cached_status, None
    _record_snapshot(job, job.session.backend.check(job.remote_task_id))
    return job.cached_status, job.queue_position


@_api(2)
def job_check(job: Job) -> tuple[JobStatus, int | None]:
    """Current status and, while waiting in the queue, the queue position."""
    job = _job(job, JobState.SUBMITTED)
    return _check(job)


@_api()
def job_wait(job: Job, timeout: float | None = None) -> None:
    """Poll until the job is terminal; ``timeout=None`` waits indefinitely."""
    job = _job(job, JobState.SUBMITTED)
    runtime = job.session._device.runtime
    deadline = None if timeout is None else runtime.clock() + max(0.0, timeout)
    for interval in runtime.poll.intervals():
        status, _ = _check(job)
        if status.is_terminal:
            return
        if deadline is not None:
            remaining = deadline - runtime.clock()
            if remaining <= 0:
                raise DeadlineExceededError(f"job {job.local_id} still {status.name} at timeout")
            interval = min(interval, remaining)
        runtime.sleep(interval)


@_api(1)
def job_get_results(job: Job) -> ResultHistogram:
    job = _job(job, JobState.SUBMITTED)
    if job.cached_status is not JobStatus.DONE:
        raise BadStateError("results are available only after DONE has been observed")
    if job.result_cache is None:
        histogram = job.session.backend.results(job.task_snapshot)
        shots = job.params.get(JobParameter.SHOTS)
        if shots is not None and histogram.shots != shots:
            raise FatalError(f"result holds {histogram.shots} shots, job requested {shots}")
        job.result_cache = histogram
    return job.result_cache


@_api()
def job_cancel(job: Job) -> None:
    job = _job(job, JobState.SUBMITTED)
    if job.cached_status is not None and job.cached_status.is_terminal:
        raise BadStateError(f"job already {job.cached_status.name}")
    job.session.backend.cancel(job.remote_task_id)


@_api()
def job_free(job: Job) -> None:
    """Release the handle; the remote task, if any, keeps running."""
    if not isinstance(job, Job):
        raise InvalidArgumentError("not a job handle")
    if job.state is JobState.FREED:
        raise BadStateError("job already freed")
    job.state = JobState.FREED
    if job in job.session.jobs:
        job.session.jobs.remove(job)
