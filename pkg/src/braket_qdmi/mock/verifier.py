"""Server-side SigV4 verification, written independently of the client signer."""

from __future__ import annotations

import hashlib
import hmac
import posixpath
import re
from collections.abc import Mapping
from dataclasses import dataclass
from urllib.parse import quote, unquote, unquote_plus

_AUTH = re.compile(
    r"AWS4-HMAC-SHA256 Credential=(?P<key>[A-Za-z0-9]+)/(?P<date>\d{8})/(?P<region>[a-z0-9-]+)/"
    r"(?P<service>[a-z0-9-]+)/aws4_request, SignedHeaders=(?P<signed>[a-z0-9-]+(?:;[a-z0-9-]+)*), "
    r"Signature=(?P<signature>[0-9a-f]{64})"
)


class SignatureError(Exception):
    pass


@dataclass(frozen=True)
class Identity:
    access_key_id: str
    region: str
    service: str


def _derive(secret: str, date: str, region: str, service: str) -> bytes:
    key = ("AWS4" + secret).encode()
    for part in (date, region, service, "aws4_request"):
        key = hmac.new(key, part.encode(), hashlib.sha256).digest()
    return key


def _uri(raw_path: str, service: str) -> str:
    if service == "s3":
        return quote(unquote(raw_path), safe="/~") or "/"
    path = posixpath.normpath(raw_path or "/")
    if path.startswith("//"):
        path = "/" + path.lstrip("/")
    if raw_path.endswith("/") and path != "/":
        path += "/"
    return quote(path, safe="/~")


def _query(raw_query: str) -> str:
    pairs = []
    for item in raw_query.split("&") if raw_query else []:
        if not item:
            continue
        name, _, value = item.partition("=")
        pairs.append((quote(unquote_plus(name), safe="-_.~"), quote(unquote_plus(value), safe="-_.~")))
    return "&".join(f"{n}={v}" for n, v in sorted(pairs))


def verify(
    method: str, target: str, headers: Mapping[str, str], body: bytes, secrets: Mapping[str, str]
) -> Identity:
    """Check the Authorization header of a request against the known key pairs.

    ``target`` is the raw request-target (path and optional query) as received.
    """
    lower: dict[str, str] = {}
    for name, value in headers.items():
        lower[name.lower()] = value
    auth = lower.get("authorization")
    if auth is None:
        raise SignatureError("missing Authorization header")
    m = _AUTH.fullmatch(auth)
    if m is None:
        raise SignatureError("malformed Authorization header")
    secret = secrets.get(m["key"])
    if secret is None:
        raise SignatureError("unknown access key")
    signed = m["signed"].split(";")
    if signed != sorted(set(signed)) or "host" not in signed or "x-amz-date" not in signed:
        raise SignatureError("signed headers must be sorted, unique and include host and x-amz-date")
    amz_date = lower.get("x-amz-date", "")
    if not re.fullmatch(r"\d{8}T\d{6}Z", amz_date) or amz_date[:8] != m["date"]:
        raise SignatureError("credential scope date does not match x-amz-date")
    body_hash = hashlib.sha256(body).hexdigest()
    if lower.get("x-amz-content-sha256") != body_hash:
        raise SignatureError("x-amz-content-sha256 does not match the body")
    missing = [h for h in signed if h not in lower]
    if missing:
        raise SignatureError(f"signed headers absent from request: {missing}")

    path, _, query = target.partition("?")
    header_block = "".join(f"{h}:{' '.join(lower[h].split())}\n" for h in signed)
    canonical = "\n".join(
        [method.upper(), _uri(path, m["service"]), _query(query), header_block, m["signed"], body_hash]
    )
    scope = f"{m['date']}/{m['region']}/{m['service']}/aws4_request"
    to_sign = "\n".join(["AWS4-HMAC-SHA256", amz_date, scope, hashlib.sha256(canonical.encode()).hexdigest()])
    expected = hmac.new(_derive(secret, m["date"], m["region"], m["service"]), to_sign.encode(), hashlib.sha256)
    if not hmac.compare_digest(expected.hexdigest(), m["signature"]):
        raise SignatureError("signature mismatch")
    return Identity(m["key"], m["region"], m["service"])
