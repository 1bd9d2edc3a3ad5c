"""AWS Signature Version 4 request signing."""

from __future__ import annotations

import datetime as dt
import hashlib
import hmac
import posixpath
import re
from urllib.parse import parse_qsl, quote, unquote, urlsplit

from braket_qdmi.errors import InvalidArgumentError

from .credentials import Credentials
from .http import HttpRequest

ALGORITHM = "AWS4-HMAC-SHA256"
EMPTY_SHA256 = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"

_SPACES = re.compile(r"\s+")
_MANAGED_HEADERS = frozenset(
    {"authorization", "host", "x-amz-date", "x-amz-content-sha256", "x-amz-security-token"}
)


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _hmac(key: bytes, msg: str) -> bytes:
    return hmac.new(key, msg.encode("utf-8"), hashlib.sha256).digest()


def signing_key(secret: str, date: str, region: str, service: str) -> bytes:
    key = _hmac(("AWS4" + secret).encode("utf-8"), date)
    key = _hmac(key, region)
    key = _hmac(key, service)
    return _hmac(key, "aws4_request")


def canonical_uri(path: str, service: str) -> str:
    if not path:
        return "/"
    if service == "s3":
        # object keys are signed as sent, encoded once
        return quote(unquote(path), safe="/~")
    normalized = posixpath.normpath(path)
    if normalized.startswith("//"):
        normalized = "/" + normalized.lstrip("/")
    if path.endswith("/") and normalized != "/":
        normalized += "/"
    return quote(normalized, safe="/~")


def canonical_query(query: str) -> str:
    pairs = [(quote(k, safe="-_.~"), quote(v, safe="-_.~")) for k, v in parse_qsl(query, keep_blank_values=True)]
    return "&".join(f"{k}={v}" for k, v in sorted(pairs))


def canonical_headers(headers: dict[str, str]) -> tuple[str, str]:
    """Return (canonical header block, signed-header list) over every header but Authorization."""
    folded: dict[str, str] = {}
    for name, value in headers.items():
        key = name.lower().strip()
        if key == "authorization":
            continue
        value = _SPACES.sub(" ", value.strip())
        folded[key] = f"{folded[key]},{value}" if key in folded else value
    names = sorted(folded)
    return "".join(f"{n}:{folded[n]}\n" for n in names), ";".join(names)


def canonical_request(request: HttpRequest, service: str, payload_hash: str) -> tuple[str, str]:
    parts = urlsplit(request.url)
    block, signed = canonical_headers(request.headers)
    text = "\n".join(
        [
            request.method.upper(),
            canonical_uri(parts.path, service),
            canonical_query(parts.query),
            block,
            signed,
            payload_hash,
        ]
    )
    return text, signed


def string_to_sign(amz_date: str, scope: str, canonical: str) -> str:
    return "\n".join([ALGORITHM, amz_date, scope, sha256_hex(canonical.encode("utf-8"))])


def _host_header(url: str) -> str:
    parts = urlsplit(url)
    if not parts.hostname:
        raise InvalidArgumentError(f"request URL has no host: {url!r}")
    host = parts.hostname
    if parts.port and not (
        (parts.scheme == "https" and parts.port == 443) or (parts.scheme == "http" and parts.port == 80)
    ):
        host = f"{host}:{parts.port}"
    return host


def sign_request(
    creds: Credentials,
    request: HttpRequest,
    region: str,
    service: str,
    timestamp: dt.datetime | None = None,
    *,
    payload_header: bool = True,
) -> HttpRequest:
    """Return a copy of ``request`` carrying SigV4 authentication headers.

    Every header present on the request (plus host, x-amz-date and, when
    applicable, x-amz-content-sha256 and x-amz-security-token) is signed.
    ``payload_header=False`` omits x-amz-content-sha256, as in the generic
    SigV4 test-suite requests.
    """
    try:
        host = _host_header(request.url)
    except ValueError as exc:
        raise InvalidArgumentError(f"malformed URL {request.url!r}: {exc}") from exc
    timestamp = timestamp or dt.datetime.now(dt.timezone.utc)
    if timestamp.tzinfo is not None:
        timestamp = timestamp.astimezone(dt.timezone.utc)
    amz_date = timestamp.strftime("%Y%m%dT%H%M%SZ")
    date = amz_date[:8]

    headers = {k: v for k, v in request.headers.items() if k.lower() not in _MANAGED_HEADERS}
    headers["host"] = host
    headers["x-amz-date"] = amz_date
    payload_hash = sha256_hex(request.body)
    if payload_header:
        headers["x-amz-content-sha256"] = payload_hash
    if creds.session_token:
        headers["x-amz-security-token"] = creds.session_token

    signed_request = HttpRequest(request.method, request.url, headers, request.body)
    canonical, signed = canonical_request(signed_request, service, payload_hash)
    scope = f"{date}/{region}/{service}/aws4_request"
    signature = hmac.new(
        signing_key(creds.secret_access_key, date, region, service),
        string_to_sign(amz_date, scope, canonical).encode("utf-8"),
        hashlib.sha256,
    ).hexdigest()
    headers["Authorization"] = (
        f"{ALGORITHM} Credential={creds.access_key_id}/{scope}, SignedHeaders={signed}, Signature={signature}"
    )
    return signed_request
