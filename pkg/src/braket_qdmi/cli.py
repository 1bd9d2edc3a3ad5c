"""``qdb``: list devices, submit programs, poll tasks and fetch results from the shell.

Settings resolve once at startup with precedence flags > ``QDB_*`` environment
variables > the ``[qdb]`` section of a config file (``--config`` or
``QDB_CONFIG``). Credentials follow the usual chain: explicit flags, then the
shared credentials file, then ``AWS_*`` environment variables.

Exit codes:

==  ==========================================================
0   success (for ``wait``/``results``: the task is DONE)
1   any other error (unknown task, device refused, ...)
2   authentication or authorization failure
3   transport failure after retries
4   local or remote validation failure
5   task FAILED or CANCELED, or results requested before DONE
6   ``wait`` timed out
7   the service reported a status with no job-status equivalent
64  command-line usage error
==  ==========================================================
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, TextIO

from braket_qdmi import qasm
from braket_qdmi.device import core
from braket_qdmi.device.runtime import Runtime
from braket_qdmi.enums import DeviceProperty, JobParameter, JobStatus, SessionParameter
from braket_qdmi.errors import StatusCode, TransportError, UnexpectedStatusError

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_AUTH = 2
EXIT_TRANSPORT = 3
EXIT_VALIDATION = 4
EXIT_NOT_DONE = 5
EXIT_TIMEOUT = 6
EXIT_NOT_SET = 7
EXIT_USAGE = 64

_SETTINGS = (
    # (attribute, env suffix, config key)
    ("device_arn", "DEVICE_ARN", "device_arn"),
    ("region", "REGION", "region"),
    ("endpoint", "ENDPOINT", "endpoint"),
    ("object_store_endpoint", "OBJECT_STORE_ENDPOINT", "object_store_endpoint"),
    ("credentials_file", "CREDENTIALS_FILE", "credentials_file"),
    ("profile", "PROFILE", "profile"),
    ("output_format", "FORMAT", "format"),
    ("timeout", "TIMEOUT", "timeout"),
    ("queue_threshold", "QUEUE_THRESHOLD", "queue_threshold"),
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


@dataclass
class CliConfig:
    device_arns: list[str] = field(default_factory=list)
    region: str | None = None
    access_key_id: str | None = None
    secret_access_key: str | None = None
    session_token: str | None = None
    credentials_file: str | None = None
    profile: str | None = None
    endpoint: str | None = None
    object_store_endpoint: str | None = None
    output_format: str = "human"
    timeout: float | None = None
    queue_threshold: int | None = None

    def session_parameters(self, arn: str) -> dict[SessionParameter, Any]:
        pairs = [
            (SessionParameter.DEVICE_ARN, arn),
            (SessionParameter.DEFAULT_REGION, self.region),
            (SessionParameter.ACCESS_KEY_ID, self.access_key_id),
            (SessionParameter.SECRET_ACCESS_KEY, self.secret_access_key),
            (SessionParameter.SESSION_TOKEN, self.session_token),
            (SessionParameter.CREDENTIALS_FILE_PATH, self.credentials_file),
            (SessionParameter.PROFILE_NAME, self.profile),
            (SessionParameter.CUSTOM_ENDPOINT_BRAKET, self.endpoint),
            (SessionParameter.CUSTOM_ENDPOINT_OBJECT_STORE, self.object_store_endpoint),
            (SessionParameter.CUSTOM_QUEUE_THRESHOLD, self.queue_threshold),
        ]
        return {k: v for k, v in pairs if v is not None}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--device-arn", action="append", dest="device_arn", metavar="ARN")
    common.add_argument("--region")
    common.add_argument("--access-key-id")
    common.add_argument("--secret-access-key")
    common.add_argument("--session-token")
    common.add_argument("--credentials-file")
    common.add_argument("--profile")
    common.add_argument("--endpoint", help="quantum-task API endpoint override")
    common.add_argument("--object-store-endpoint", help="result object store endpoint override")
    common.add_argument("--format", dest="output_format", choices=("human", "json"))
    common.add_argument("--timeout", type=float, help="seconds for wait; default waits forever")
    common.add_argument("--queue-threshold", type=int, help="queue depth at which a device reports BUSY")
    common.add_argument("--config", help="INI file with a [qdb] section")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="qdb", description="Drive quantum tasks through the device interface.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("devices", parents=[common], help="show status and queue depth of devices")
    submit = sub.add_parser("submit", parents=[common], help="submit an OpenQASM 3 program")
    submit.add_argument("program", help="path to the program file (UTF-8)")
    submit.add_argument("--shots", type=int, required=True)
    submit.add_argument("--bucket", required=True)
    submit.add_argument("--key-prefix")
    submit.add_argument("--reservation-arn")
    for name, help_text in (
        ("status", "print the current task status"),
        ("wait", "block until the task is terminal"),
        ("results", "print the measurement histogram"),
    ):
        cmd = sub.add_parser(name, parents=[common], help=help_text)
        cmd.add_argument("task_id")
    return parser


def resolve_config(args: argparse.Namespace, environ: Mapping[str, str]) -> CliConfig:
    file_values: Mapping[str, str] = {}
    config_path = args.config or environ.get("QDB_CONFIG")
    if config_path:
        ini = configparser.ConfigParser()
        try:
            with open(config_path, encoding="utf-8") as fh:
                ini.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise UsageError(f"cannot read config file {config_path}: {exc}") from None
        if ini.has_section("qdb"):
            file_values = dict(ini.items("qdb"))

    raw: dict[str, Any] = {}
    for attr, env_suffix, key in _SETTINGS:
        flag = getattr(args, attr, None)
        if flag is not None:
            raw[attr] = flag
        elif environ.get(f"QDB_{env_suffix}"):
            raw[attr] = environ[f"QDB_{env_suffix}"]
        elif file_values.get(key):
            raw[attr] = file_values[key]

    arns = raw.pop("device_arn", None) or []
    if isinstance(arns, str):
        arns = [a.strip() for a in arns.split(",") if a.strip()]
    config = CliConfig(
        device_arns=list(arns),
        access_key_id=args.access_key_id,
        secret_access_key=args.secret_access_key,
        session_token=args.session_token,
    )
    for attr in ("region", "endpoint", "object_store_endpoint", "credentials_file", "profile"):
        setattr(config, attr, raw.get(attr))
    config.output_format = raw.get("output_format", "human")
    if config.output_format not in ("human", "json"):
        raise UsageError(f"format must be human or json, not {config.output_format!r}")
    try:
        if raw.get("timeout") is not None:
            config.timeout = float(raw["timeout"])
        if raw.get("queue_threshold") is not None:
            config.queue_threshold = int(raw["queue_threshold"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not config.device_arns:
        raise UsageError("a device ARN is required (--device-arn, QDB_DEVICE_ARN or config device_arn)")
    return config


class CommandFailed(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


def _exit_code(status: StatusCode, error: BaseException | None) -> int:
    if status is StatusCode.ERROR_PERMISSION_DENIED:
        return EXIT_AUTH
    if status in (StatusCode.ERROR_INVALID_ARGUMENT, StatusCode.ERROR_NOT_SUPPORTED):
        return EXIT_VALIDATION
    if status is StatusCode.ERROR_TIMEOUT:
        return EXIT_TIMEOUT
    if isinstance(error, UnexpectedStatusError):
        return EXIT_NOT_SET
    if isinstance(error, TransportError):
        return EXIT_TRANSPORT
    return EXIT_ERROR


def _ok(status: StatusCode, owner: Any, what: str) -> None:
    if status is StatusCode.SUCCESS:
        return
    error = getattr(owner, "last_error", None)
    detail = f": {error}" if error is not None else ""
    raise CommandFailed(_exit_code(status, error), f"{what} failed ({status.name}){detail}")


def _open_session(config: CliConfig, arn: str) -> core.Session:
    status, session = core.session_alloc()
    _ok(status, None, "session allocation")
    for param, value in config.session_parameters(arn).items():
        _ok(core.session_set_parameter(session, param, value), session, f"setting {param.name}")
    _ok(core.session_init(session), session, "session init")
    return session


def _status_text(status: JobStatus, position: int | None) -> str:
    return status.name if position is None else f"{status.name} (position {position})"


class _Commands:
    def __init__(self, config: CliConfig, out: TextIO) -> None:
        self.config = config
        self.out = out
        self.json = config.output_format == "json"

    def emit(self, human: str, payload: Any) -> None:
        print(json.dumps(payload, sort_keys=True) if self.json else human, file=self.out)

    def devices(self, args: argparse.Namespace) -> int:
        rows = []
        for arn in self.config.device_arns:
            session = _open_session(self.config, arn)
            values = {}
            for prop in (DeviceProperty.NAME, DeviceProperty.STATUS, DeviceProperty.QUEUE_DEPTH):
                status, values[prop] = core.session_query_device_property(session, prop)
                _ok(status, session, f"querying {prop.name}")
            rows.append(
                {
                    "name": values[DeviceProperty.NAME],
                    "arn": arn,
                    "status": values[DeviceProperty.STATUS].name,
                    "queueDepth": values[DeviceProperty.QUEUE_DEPTH],
                }
            )
            core.session_free(session)
        human = "\n".join(f"{r['name']}\t{r['arn']}\t{r['status']}\t{r['queueDepth']}" for r in rows)
        self.emit(human, rows)
        return EXIT_OK

    def submit(self, args: argparse.Namespace, source: str) -> int:
        session = _open_session(self.config, self.config.device_arns[0])
        status, job = core.session_create_device_job(session)
        _ok(status, session, "job creation")
        params = [
            (JobParameter.PROGRAM, source),
            (JobParameter.SHOTS, args.shots),
            (JobParameter.CUSTOM_OUTPUT_BUCKET, args.bucket),
            (JobParameter.CUSTOM_OUTPUT_KEY_PREFIX, args.key_prefix),
            (JobParameter.CUSTOM_RESERVATION_ARN, args.reservation_arn),
        ]
        for param, value in params:
            if value is not None:
                _ok(core.job_set_parameter(job, param, value), job, f"setting {param.name}")
        _ok(core.job_submit(job), job, "submit")
        self.emit(job.remote_task_id, {"taskId": job.remote_task_id, "status": job.cached_status.name})
        return EXIT_OK

    def _attach(self, task_id: str) -> core.Job:
        session = _open_session(self.config, self.config.device_arns[0])
        status, job = core.session_attach_job(session, task_id)
        _ok(status, session, "status query")
        return job

    def _report(self, job: core.Job) -> None:
        position = job.queue_position
        self.emit(
            _status_text(job.cached_status, position),
            {"taskId": job.remote_task_id, "status": job.cached_status.name, "queuePosition": position},
        )

    def status(self, args: argparse.Namespace) -> int:
        job = self._attach(args.task_id)
        self._report(job)
        return EXIT_NOT_DONE if job.cached_status in (JobStatus.FAILED, JobStatus.CANCELED) else EXIT_OK

    def wait(self, args: argparse.Namespace) -> int:
        job = self._attach(args.task_id)
        status = core.job_wait(job, self.config.timeout)
        if status is StatusCode.ERROR_TIMEOUT:
            self._report(job)
        _ok(status, job, "wait")
        self._report(job)
        return EXIT_OK if job.cached_status is JobStatus.DONE else EXIT_NOT_DONE

    def results(self, args: argparse.Namespace) -> int:
        job = self._attach(args.task_id)
        if job.cached_status is not JobStatus.DONE:
            raise CommandFailed(EXIT_NOT_DONE, f"task is {job.cached_status.name}, results need DONE")
        status, histogram = core.job_get_results(job)
        _ok(status, job, "result retrieval")
        human = "\n".join(f"{bits} {count}" for bits, count in sorted(histogram.counts.items()))
        self.emit(human, histogram.to_json())
        return EXIT_OK


def _read_program(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            source = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise CommandFailed(EXIT_VALIDATION, f"cannot read program {path}: {exc}") from None
    try:
        qasm.parse(source)
    except qasm.QasmError as exc:
        raise CommandFailed(EXIT_VALIDATION, f"program rejected: {exc}") from None
    return source


def main(
    argv: Sequence[str] | None = None,
    *,
    runtime: Runtime | None = None,
    environ: Mapping[str, str] | None = None,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
) -> int:
    """Entry point; returns the exit code. ``runtime`` lets tests inject a transport and clock."""
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    environ = os.environ if environ is None else environ
    try:
        args = build_parser().parse_args(argv)
        config = resolve_config(args, environ)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=err)

    commands = _Commands(config, out)
    try:
        # local validation happens before the device is brought up
        source = None
        if args.command == "submit":
            if args.shots < 1:
                raise CommandFailed(EXIT_VALIDATION, "--shots must be at least 1")
            source = _read_program(args.program)
        status = core.device_initialize(runtime or Runtime(environ=environ))
        _ok(status, None, "device initialization")
        try:
            if args.command == "submit":
                return commands.submit(args, source)
            return getattr(commands, args.command)(args)
        finally:
            core.device_finalize()
    except CommandFailed as exc:
        print(f"qdb: {exc}", file=err)
        return exc.code


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
