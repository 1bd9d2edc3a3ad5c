"""Run the mock cloud over HTTP: ``python -m braket_qdmi.mock catalog.json``."""

from __future__ import annotations

import argparse
import json
import logging
import threading

from .clock import ClockMode
from .service import Latencies, MockDeviceEntry, start


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="python -m braket_qdmi.mock")
    parser.add_argument("catalog", help="JSON file: list of device entries")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8080)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--manual-clock", action="store_true", help="advance time only via POST /_mock/advance")
    parser.add_argument("--key", action="append", default=[], metavar="ID:SECRET", help="accepted key pair")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO)
    with open(args.catalog, encoding="utf-8") as fh:
        catalog = [MockDeviceEntry.from_dict(d) for d in json.load(fh)]
    auth = [tuple(k.split(":", 1)) for k in args.key] or [("AKIDMOCK", "mock-secret")]
    mode = ClockMode.MANUAL if args.manual_clock else ClockMode.REALTIME
    _, server = start(catalog, args.seed, Latencies(), auth, clock_mode=mode, port=args.port, host=args.host)
    print(f"mock cloud listening on {server.endpoint}", flush=True)
    try:
        threading.Event().wait()
    except KeyboardInterrupt:
        pass
    finally:
        server.close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
