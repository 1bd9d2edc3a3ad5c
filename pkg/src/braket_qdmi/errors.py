"""Status codes and the exception hierarchy shared by every layer.

Lower layers raise; the device layer converts exceptions into
:class:`StatusCode` values at its public boundary.
"""

from __future__ import annotations

from enum import IntEnum


class StatusCode(IntEnum):
    SUCCESS = 0
    ERROR_INVALID_ARGUMENT = 1
    ERROR_BAD_STATE = 2
    ERROR_NOT_SUPPORTED = 3
    ERROR_NOT_FOUND = 4
    ERROR_PERMISSION_DENIED = 5
    ERROR_TIMEOUT = 6
    ERROR_FATAL = 7


class QDMIError(Exception):
    """Base class; ``status`` is the code reported at the device boundary."""

    status = StatusCode.ERROR_FATAL


class InvalidArgumentError(QDMIError):
    status = StatusCode.ERROR_INVALID_ARGUMENT


class BadStateError(QDMIError):
    status = StatusCode.ERROR_BAD_STATE


class NotSupportedError(QDMIError):
    status = StatusCode.ERROR_NOT_SUPPORTED


class NotFoundError(QDMIError):
    status = StatusCode.ERROR_NOT_FOUND


class PermissionDeniedError(QDMIError):
    status = StatusCode.ERROR_PERMISSION_DENIED


class DeadlineExceededError(QDMIError):
    status = StatusCode.ERROR_TIMEOUT


class FatalError(QDMIError):
    status = StatusCode.ERROR_FATAL


class TransportError(FatalError):
    """Network failure, or 5xx responses outlasting the retry budget."""


class UnexpectedStatusError(FatalError):
    """The service reported a task status with no client-side meaning (NOT_SET)."""


class DeviceUnavailableError(BadStateError):
    """Target device refuses new tasks (HTTP 424)."""


class ConflictError(BadStateError):
    """Operation conflicts with the remote resource state (HTTP 409)."""
