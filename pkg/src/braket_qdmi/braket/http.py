"""Minimal HTTP request/response types and the default urllib transport."""

from __future__ import annotations

import urllib.error
import urllib.request
from collections.abc import Callable
from dataclasses import dataclass, field

from braket_qdmi.errors import TransportError


@dataclass
class HttpRequest:
    method: str
    url: str
    headers: dict[str, str] = field(default_factory=dict)
    body: bytes = b""


@dataclass
class HttpResponse:
    status: int
    headers: dict[str, str] = field(default_factory=dict)
    body: bytes = b""


Transport = Callable[[HttpRequest], HttpResponse]


class UrllibTransport:
    """Blocking transport; connection failures surface as :class:`TransportError`."""

    def __init__(self, timeout: float = 30.0) -> None:
        self.timeout = timeout
        self._opener = urllib.request.build_opener(urllib.request.ProxyHandler({}))

    def __call__(self, request: HttpRequest) -> HttpResponse:
        req = urllib.request.Request(
            request.url,
            data=request.body if request.method not in ("GET", "HEAD") else None,
            headers=request.headers,
            method=request.method,
        )
        try:
            with self._opener.open(req, timeout=self.timeout) as resp:
                return HttpResponse(resp.status, dict(resp.headers.items()), resp.read())
        except urllib.error.HTTPError as err:
            body = err.read() if err.fp is not None else b""
            return HttpResponse(err.code, dict(err.headers.items()) if err.headers else {}, body)
        except (urllib.error.URLError, OSError) as err:
            raise TransportError(f"{request.method} {request.url}: {err}") from err
