"""Shared fixtures data and helpers for the test suite."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

from braket_qdmi import device as d
from braket_qdmi.braket.client import RetryPolicy
from braket_qdmi.device import JobParameter, SessionParameter, StatusCode
from braket_qdmi.mock import MockCloud, MockDeviceEntry

ARN = "arn:aws:braket:us-east-1::device/qpu/provider-a/machine-1"
SIM_ARN = "arn:aws:braket:::device/quantum-simulator/vendor/sim-1"
OFFLINE_ARN = "arn:aws:braket:us-east-1::device/qpu/provider-a/machine-2"
RETIRED_ARN = "arn:aws:braket:us-east-1::device/qpu/provider-b/old-machine"
KEY_ID = "AKIDMOCK"
SECRET = "mock-secret"
ENDPOINT = "http://mock.local"
BELL = "OPENQASM 3; qubit[2] q; bit[2] c; h q[0]; cx q[0], q[1]; c = measure q;"
FIXED_NOW = dt.datetime(2025, 3, 1, 12, 0, tzinfo=dt.timezone.utc)


def catalog() -> list[MockDeviceEntry]:
    return [
        MockDeviceEntry(
            ARN,
            "machine-1",
            qubit_count=5,
            queue_depth=3,
            native_gates=["x", "y", "z", "h", "s", "sdg", "t", "tdg", "rx", "ry", "rz", "cx", "cz", "ccx"],
            site_metrics={0: {"T1_MICROSECONDS": 42.0, "T2_MICROSECONDS": 31.5}, 1: {"T1_MICROSECONDS": 40.0}},
            operation_metrics={
                "cx": {
                    "arity": 2,
                    "metrics": {"FIDELITY": 0.98, "DURATION_NANOSECONDS": 300.0},
                    "sites": {"0,1": {"FIDELITY": 0.991}},
                },
                "h": {"arity": 1, "metrics": {"FIDELITY": 0.9995}},
            },
        ),
        MockDeviceEntry(SIM_ARN, "sim-1", qubit_count=20),
        MockDeviceEntry(OFFLINE_ARN, "machine-2", status="OFFLINE", qubit_count=5),
        MockDeviceEntry(RETIRED_ARN, "old-machine", status="RETIRED", qubit_count=2),
    ]


def make_cloud(seed: int = 7, **kwargs) -> MockCloud:
    return MockCloud(catalog(), seed=seed, auth={KEY_ID: SECRET}, **kwargs)


class CloudTransport:
    """Forwards to a swappable mock so one device runtime can outlive many clouds."""

    def __init__(self, cloud: MockCloud) -> None:
        self.cloud = cloud

    def __call__(self, request):
        return self.cloud(request)

    def now(self) -> float:
        return self.cloud.now()

    def sleep(self, seconds: float) -> None:
        self.cloud.sleep(seconds)


def make_runtime(cloud: MockCloud | CloudTransport, seed: int = 1, **kwargs) -> d.Runtime:
    transport = cloud if isinstance(cloud, CloudTransport) else CloudTransport(cloud)
    defaults = dict(
        transport=transport,
        clock=transport.now,
        sleep=transport.sleep,
        now=lambda: FIXED_NOW,
        seed=seed,
        # keep credential resolution away from the real home directory
        environ={"AWS_SHARED_CREDENTIALS_FILE": "/nonexistent/credentials"},
        retry=RetryPolicy(base_delay=0.0),
    )
    defaults.update(kwargs)
    return d.Runtime(**defaults)


SESSION_PARAMS = {
    SessionParameter.DEVICE_ARN: ARN,
    SessionParameter.ACCESS_KEY_ID: KEY_ID,
    SessionParameter.SECRET_ACCESS_KEY: SECRET,
    SessionParameter.CUSTOM_ENDPOINT_BRAKET: ENDPOINT,
    SessionParameter.CUSTOM_ENDPOINT_OBJECT_STORE: ENDPOINT,
}


def open_session(overrides: dict | None = None) -> d.Session:
    """Allocated and initialized session; ``None`` values in ``overrides`` drop a default."""
    status, session = d.session_alloc()
    assert status is StatusCode.SUCCESS
    params = {**SESSION_PARAMS, **(overrides or {})}
    for key, value in params.items():
        if value is not None:
            assert d.session_set_parameter(session, key, value) is StatusCode.SUCCESS, key
    assert d.session_init(session) is StatusCode.SUCCESS, session.last_error
    return session


def configured_job(session: d.Session, program: str = BELL, shots: int = 100, bucket: str = "results") -> d.Job:
    status, job = d.session_create_device_job(session)
    assert status is StatusCode.SUCCESS
    assert d.job_set_parameter(job, JobParameter.PROGRAM, program) is StatusCode.SUCCESS
    assert d.job_set_parameter(job, JobParameter.SHOTS, shots) is StatusCode.SUCCESS
    assert d.job_set_parameter(job, JobParameter.CUSTOM_OUTPUT_BUCKET, bucket) is StatusCode.SUCCESS
    return job


@dataclass
class LifecycleOutcome:
    queued_position: int | None
    final_status: d.JobStatus
    counts: dict[str, int]
    result_documents: dict[tuple[str, str], bytes]
    request_counts: dict[str, int]
