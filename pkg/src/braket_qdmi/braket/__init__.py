"""Adapter onto the Braket-style quantum-task REST API and result object store."""

from .arn import DEVICE_TYPES, DeviceArn, parse_device_arn, resolve_region
from .client import (
    BraketClient,
    CreatedTask,
    DeviceDetail,
    ObjectStoreClient,
    OperationMetrics,
    RetryPolicy,
    TaskDetail,
    default_endpoint,
    result_key,
)
from .credentials import CredentialSource, Credentials, load_credentials
from .http import HttpRequest, HttpResponse, Transport, UrllibTransport
from .results import MalformedResultError, ResultHistogram, parse_result_document
from .sigv4 import EMPTY_SHA256, sign_request
from .status import (
    DEFAULT_QUEUE_THRESHOLD,
    BraketDeviceStatus,
    BraketTaskStatus,
    map_device_status,
    map_task_status,
)

__all__ = [
    "DEFAULT_QUEUE_THRESHOLD",
    "DEVICE_TYPES",
    "EMPTY_SHA256",
    "BraketClient",
    "BraketDeviceStatus",
    "BraketTaskStatus",
    "CreatedTask",
    "CredentialSource",
    "Credentials",
    "DeviceArn",
    "DeviceDetail",
    "HttpRequest",
    "HttpResponse",
    "MalformedResultError",
    "ObjectStoreClient",
    "OperationMetrics",
    "ResultHistogram",
    "RetryPolicy",
    "TaskDetail",
    "Transport",
    "UrllibTransport",
    "default_endpoint",
    "load_credentials",
    "map_device_status",
    "map_task_status",
    "parse_device_arn",
    "parse_result_document",
    "resolve_region",
    "result_key",
    "sign_request",
]
