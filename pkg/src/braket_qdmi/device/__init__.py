"""Device, session and job lifecycles with status-code results."""

from braket_qdmi.enums import (
    DeviceProperty,
    DeviceStatus,
    JobParameter,
    JobStatus,
    OperationProperty,
    SessionParameter,
    SiteProperty,
)
from braket_qdmi.errors import StatusCode

from .core import (
    Device,
    Job,
    JobState,
    Session,
    SessionState,
    current_device,
    device_finalize,
    device_initialize,
    job_cancel,
    job_check,
    job_free,
    job_get_results,
    job_set_parameter,
    job_submit,
    job_wait,
    session_alloc,
    session_attach_job,
    session_create_device_job,
    session_free,
    session_init,
    session_query_device_property,
    session_query_operation_property,
    session_query_site_property,
    session_set_parameter,
)
from .runtime import PollPolicy, Runtime

__all__ = [
    "Device",
    "DeviceProperty",
    "DeviceStatus",
    "Job",
    "JobParameter",
    "JobState",
    "JobStatus",
    "OperationProperty",
    "PollPolicy",
    "Runtime",
    "Session",
    "SessionParameter",
    "SessionState",
    "SiteProperty",
    "StatusCode",
    "current_device",
    "device_finalize",
    "device_initialize",
    "job_cancel",
    "job_check",
    "job_free",
    "job_get_results",
    "job_set_parameter",
    "job_submit",
    "job_wait",
    "session_alloc",
    "session_attach_job",
    "session_create_device_job",
    "session_free",
    "session_init",
    "session_query_device_property",
    "session_query_operation_property",
    "session_query_site_property",
    "session_set_parameter",
]
