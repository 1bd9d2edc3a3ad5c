"""Enumerations of the device interface: parameters, properties and statuses."""

from __future__ import annotations

from enum import IntEnum


class SessionParameter(IntEnum):
    DEVICE_ARN = 0
    ACCESS_KEY_ID = 1
    SECRET_ACCESS_KEY = 2
    SESSION_TOKEN = 3
    CREDENTIALS_FILE_PATH = 4
    PROFILE_NAME = 5
    DEFAULT_REGION = 6
    CUSTOM_ENDPOINT_BRAKET = 100
    CUSTOM_ENDPOINT_OBJECT_STORE = 101
    CUSTOM_QUEUE_THRESHOLD = 102


class JobParameter(IntEnum):
    PROGRAM = 0
    PROGRAM_FORMAT = 1
    SHOTS = 2
    CUSTOM_OUTPUT_BUCKET = 100
    CUSTOM_OUTPUT_KEY_PREFIX = 101
    CUSTOM_RESERVATION_ARN = 102


class DeviceProperty(IntEnum):
    NAME = 0
    VERSION = 1
    QUBIT_COUNT = 2
    STATUS = 3
    QUEUE_DEPTH = 4


class SiteProperty(IntEnum):
    T1_MICROSECONDS = 0
    T2_MICROSECONDS = 1
    READOUT_FIDELITY = 2


class OperationProperty(IntEnum):
    FIDELITY = 0
    DURATION_NANOSECONDS = 1


class JobStatus(IntEnum):
    CREATED = 0
    QUEUED = 1
    RUNNING = 2
    DONE = 3
    FAILED = 4
    CANCELED = 5

    @property
    def is_terminal(self) -> bool:
        return self in (JobStatus.DONE, JobStatus.FAILED, JobStatus.CANCELED)


class DeviceStatus(IntEnum):
    ERROR = 0
    OFFLINE = 1
    IDLE = 2
    BUSY = 3
    MAINTENANCE = 4
    CALIBRATION = 5


PROGRAM_FORMAT_OPENQASM3 = "openqasm3"
