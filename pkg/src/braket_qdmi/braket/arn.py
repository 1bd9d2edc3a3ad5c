"""Device ARN parsing and region resolution."""

from __future__ import annotations

import re
from dataclasses import dataclass

from braket_qdmi.errors import InvalidArgumentError

DEVICE_TYPES = ("qpu", "quantum-simulator")

_ARN_RE = re.compile(
    r"^arn:(?P<partition>[a-z][a-z0-9-]*):braket:(?P<region>[a-z0-9-]*)::device/"
    r"(?P<device_type>[^/]+)/(?P<provider>[^/\s]+)/(?P<device_name>[^/\s]+)$"
)


@dataclass(frozen=True)
class DeviceArn:
    partition: str
    region: str | None
    device_type: str
    provider: str
    device_name: str

    @property
    def raw(self) -> str:
        return (
            f"arn:{self.partition}:braket:{self.region or ''}::device/"
            f"{self.device_type}/{self.provider}/{self.device_name}"
        )

    def __str__(self) -> str:
        return self.raw


def parse_device_arn(text: str) -> DeviceArn:
    """Parse ``arn:<partition>:braket:<region?>::device/<type>/<provider>/<name>``."""
    if not isinstance(text, str):
        raise InvalidArgumentError(f"device ARN must be a string, got {type(text).__name__}")
    m = _ARN_RE.match(text)
    if m is None:
        raise InvalidArgumentError(f"malformed Braket device ARN: {text!r}")
    if m["device_type"] not in DEVICE_TYPES:
        raise InvalidArgumentError(f"device type must be one of {DEVICE_TYPES}, got {m['device_type']!r}")
    return DeviceArn(
        partition=m["partition"],
        region=m["region"] or None,
        device_type=m["device_type"],
        provider=m["provider"],
        device_name=m["device_name"],
    )


def resolve_region(arn: DeviceArn, session_default: str | None, ambient_default: str | None) -> str:
    """Region embedded in the ARN wins, then the session default, then the environment."""
    for candidate in (arn.region, session_default, ambient_default):
        if candidate:
            return candidate
    raise InvalidArgumentError(
        f"no region for {arn.raw}: the ARN has none and neither DEFAULT_REGION nor "
        "AWS_DEFAULT_REGION is set"
    )
