"""Translation between the cloud service's status vocabulary and the device interface's."""

from __future__ import annotations

from enum import Enum

from braket_qdmi.enums import DeviceStatus, JobStatus
from braket_qdmi.errors import UnexpectedStatusError

DEFAULT_QUEUE_THRESHOLD = 10


class BraketTaskStatus(Enum):
    CREATED = "CREATED"
    QUEUED = "QUEUED"
    RUNNING = "RUNNING"
    COMPLETED = "COMPLETED"
    FAILED = "FAILED"
    CANCELLED = "CANCELLED"
    CANCELLING = "CANCELLING"
    NOT_SET = "NOT_SET"

    @classmethod
    def parse(cls, text: object) -> BraketTaskStatus:
        try:
            return cls(text)
        except ValueError:
            return cls.NOT_SET

    @property
    def is_terminal(self) -> bool:
        return self in (BraketTaskStatus.COMPLETED, BraketTaskStatus.FAILED, BraketTaskStatus.CANCELLED)


class BraketDeviceStatus(Enum):
    ONLINE = "ONLINE"
    OFFLINE = "OFFLINE"
    RETIRED = "RETIRED"
    NOT_SET = "NOT_SET"

    @classmethod
    def parse(cls, text: object) -> BraketDeviceStatus:
        try:
            return cls(text)
        except ValueError:
            return cls.NOT_SET


_TASK_MAP = {
    BraketTaskStatus.CREATED: JobStatus.CREATED,
    BraketTaskStatus.QUEUED: JobStatus.QUEUED,
    BraketTaskStatus.RUNNING: JobStatus.RUNNING,
    BraketTaskStatus.COMPLETED: JobStatus.DONE,
    BraketTaskStatus.FAILED: JobStatus.FAILED,
    BraketTaskStatus.CANCELLED: JobStatus.CANCELED,
    # still running until the cancellation resolves
    BraketTaskStatus.CANCELLING: JobStatus.RUNNING,
}


def map_task_status(status: BraketTaskStatus) -> JobStatus:
    """Job status for a task status; NOT_SET has no counterpart and raises."""
    try:
        return _TASK_MAP[status]
    except KeyError:
        raise UnexpectedStatusError(f"task status {status.value} has no job-status equivalent") from None


def map_device_status(
    status: BraketDeviceStatus, queue_depth: int, threshold: int = DEFAULT_QUEUE_THRESHOLD
) -> DeviceStatus:
    if status is BraketDeviceStatus.RETIRED:
        return DeviceStatus.OFFLINE
    if status is BraketDeviceStatus.OFFLINE:
        return DeviceStatus.MAINTENANCE
    if status is BraketDeviceStatus.ONLINE:
        return DeviceStatus.IDLE if queue_depth < threshold else DeviceStatus.BUSY
    return DeviceStatus.ERROR
