"""Credential resolution: explicit parameters, then a credentials file, then the environment."""

from __future__ import annotations

import configparser
import os
from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from braket_qdmi.errors import PermissionDeniedError


class CredentialSource(Enum):
    EXPLICIT = "explicit"
    FILE = "file"
    ENVIRONMENT = "environment"


@dataclass(frozen=True)
class Credentials:
    access_key_id: str
    secret_access_key: str
    session_token: str | None = None
    source: CredentialSource = CredentialSource.EXPLICIT

    def __post_init__(self) -> None:
        if not self.access_key_id or not self.secret_access_key:
            raise PermissionDeniedError("access key id and secret access key must both be non-empty")

    def __repr__(self) -> str:
        return f"Credentials(access_key_id={self.access_key_id!r}, source={self.source.value})"


def default_credentials_path(environ: Mapping[str, str]) -> Path:
    if environ.get("AWS_SHARED_CREDENTIALS_FILE"):
        return Path(environ["AWS_SHARED_CREDENTIALS_FILE"])
    home = environ.get("HOME")
    return (Path(home) if home else Path.home()) / ".aws" / "credentials"


def read_credentials_file(path: Path, profile: str) -> Credentials | None:
    """Credentials from an INI file section, or None when the file or profile is absent/incomplete."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except FileNotFoundError:
        return None
    except (OSError, configparser.Error) as exc:
        raise PermissionDeniedError(f"cannot read credentials file {path}: {exc}") from exc
    if not parser.has_section(profile):
        return None
    section = parser[profile]
    key_id = section.get("aws_access_key_id", "").strip()
    secret = section.get("aws_secret_access_key", "").strip()
    if not key_id or not secret:
        return None
    token = section.get("aws_session_token", "").strip() or None
    return Credentials(key_id, secret, token, CredentialSource.FILE)


def read_environment(environ: Mapping[str, str]) -> Credentials | None:
    key_id = environ.get("AWS_ACCESS_KEY_ID")
    secret = environ.get("AWS_SECRET_ACCESS_KEY")
    if not key_id or not secret:
        return None
    return Credentials(key_id, secret, environ.get("AWS_SESSION_TOKEN") or None, CredentialSource.ENVIRONMENT)


def load_credentials(
    access_key_id: str | None = None,
    secret_access_key: str | None = None,
    session_token: str | None = None,
    file_path: str | os.PathLike | None = None,
    profile: str | None = None,
    environ: Mapping[str, str] | None = None,
) -> Credentials:
    """Resolve one complete key pair; lower-priority sources are not read once one succeeds.

    A half-specified explicit pair is rejected outright rather than silently
    replaced by another identity from the file or environment.
    """
    environ = os.environ if environ is None else environ
    if access_key_id or secret_access_key:
        if not (access_key_id and secret_access_key):
            raise PermissionDeniedError("explicit credentials need both ACCESS_KEY_ID and SECRET_ACCESS_KEY")
        return Credentials(access_key_id, secret_access_key, session_token or None, CredentialSource.EXPLICIT)

    path = Path(file_path) if file_path else default_credentials_path(environ)
    creds = read_credentials_file(path, profile or "default")
    if creds is not None:
        return creds

    creds = read_environment(environ)
    if creds is not None:
        return creds
    raise PermissionDeniedError("no credentials found in parameters, credentials file, or environment")
