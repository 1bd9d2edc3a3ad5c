"""Acceptance criteria, one test each; the terminal summary prints a PASS/FAIL line per criterion."""

import io
import json
import math
import random
import re

import numpy as np
import pytest

from braket_qdmi import cli, qasm
from braket_qdmi import device as d
from braket_qdmi.braket import sign_request
from braket_qdmi.braket.credentials import CredentialSource, Credentials
from braket_qdmi.braket.http import HttpRequest
from braket_qdmi.braket.status import BraketDeviceStatus, BraketTaskStatus, map_device_status, map_task_status
from braket_qdmi.device import DeviceProperty, DeviceStatus, JobStatus, SessionParameter, StatusCode
from braket_qdmi.errors import UnexpectedStatusError
from braket_qdmi.mock import MockCloud, SignatureError, verify

import lifecycle_fuzz
import oracles
import sigv4_vectors as v
import support

OK = StatusCode.SUCCESS


class Recorder:
    """Transport that keeps every request it forwards."""

    def __init__(self, cloud):
        self.cloud = cloud
        self.requests = []

    def __call__(self, request):
        self.requests.append(request)
        return self.cloud(request)

    def now(self):
        return self.cloud.now()

    def sleep(self, seconds):
        self.cloud.sleep(seconds)


def _target(url):
    rest = url.split("://", 1)[1]
    return rest[rest.index("/"):]


def _bell_lifecycle(seed):
    cloud = support.make_cloud(seed=seed)
    assert d.device_initialize(support.make_runtime(cloud, seed=seed)) is OK
    try:
        session = support.open_session()
        job = support.configured_job(session, shots=100)
        assert d.job_submit(job) is OK
        cloud.advance(1)
        status, job_status, position = d.job_check(job)
        assert (status, job_status) == (OK, JobStatus.QUEUED)
        cloud.advance(2)
        assert d.job_wait(job) is OK
        status, histogram = d.job_get_results(job)
        assert status is OK
        assert d.job_free(job) is OK and d.session_free(session) is OK
        return support.LifecycleOutcome(
            queued_position=position,
            final_status=job.cached_status,
            counts=histogram.counts,
            result_documents=dict(cloud.objects),
            request_counts=dict(cloud.request_counts),
        )
    finally:
        d.device_finalize()


# 1


TASK_TABLE = {
    "CREATED": JobStatus.CREATED,
    "QUEUED": JobStatus.QUEUED,
    "RUNNING": JobStatus.RUNNING,
    "COMPLETED": JobStatus.DONE,
    "FAILED": JobStatus.FAILED,
    "CANCELLED": JobStatus.CANCELED,
    "CANCELLING": JobStatus.RUNNING,
    "NOT_SET": UnexpectedStatusError,
}


def _device_row(status, depth, threshold):
    if status == "ONLINE":
        return DeviceStatus.IDLE if depth < threshold else DeviceStatus.BUSY
    return {"RETIRED": DeviceStatus.OFFLINE, "OFFLINE": DeviceStatus.MAINTENANCE, "NOT_SET": DeviceStatus.ERROR}[status]


@pytest.mark.criterion(1, "status-map table fidelity")
def test_criterion_1_status_map(stopwatch):
    assert {s.value for s in BraketTaskStatus} == set(TASK_TABLE)
    for raw, expected in TASK_TABLE.items():
        if expected is UnexpectedStatusError:
            with pytest.raises(UnexpectedStatusError):
                map_task_status(BraketTaskStatus(raw))
        else:
            assert map_task_status(BraketTaskStatus(raw)) is expected, raw
    assert {s.value for s in BraketDeviceStatus} == {"ONLINE", "OFFLINE", "RETIRED", "NOT_SET"}
    rows = 0
    for threshold in (10, 1, 4):
        for depth in (0, threshold - 1, threshold, threshold + 1):
            for raw in ("ONLINE", "OFFLINE", "RETIRED", "NOT_SET"):
                got = map_device_status(BraketDeviceStatus(raw), depth, threshold)
                assert got is _device_row(raw, depth, threshold), (raw, depth, threshold)
                rows += 1
    assert map_device_status(BraketDeviceStatus.ONLINE, 9) is DeviceStatus.IDLE
    assert map_device_status(BraketDeviceStatus.ONLINE, 10) is DeviceStatus.BUSY
    assert rows == 48
    assert stopwatch() < 1


# 2


@pytest.mark.criterion(2, "end-to-end Bell lifecycle against the mock")
def test_criterion_2_end_to_end(stopwatch):
    outcome = _bell_lifecycle(seed=11)
    assert isinstance(outcome.queued_position, int) and outcome.queued_position >= 0
    assert outcome.final_status is JobStatus.DONE
    assert set(outcome.counts) <= {"00", "11"}
    assert sum(outcome.counts.values()) == 100
    assert outcome.request_counts["CreateQuantumTask"] == 1
    assert outcome.request_counts["GetQuantumTask"] >= 1
    assert outcome.request_counts["GetObject"] == 1
    assert stopwatch() < 5


# 3


@pytest.mark.criterion(3, "lifecycle fuzz, 10,000 sequences")
def test_criterion_3_lifecycle_fuzz(stopwatch):
    transport = support.CloudTransport(None)
    stats = lifecycle_fuzz.Stats()
    for seed in range(10_000):
        rng = random.Random(seed)
        # raises lifecycle_fuzz.Violation on any crash or contract breach
        lifecycle_fuzz.run_sequence(rng.randrange, 32, transport, stats)
    elapsed = stopwatch()
    print(f"fuzz: {stats.calls} calls, {stats.illegal} illegal, {elapsed:.1f} s; successes {stats.succeeded}")
    assert stats.illegal > 10_000
    for op in ("init", "create_job", "submit", "check", "wait0", "results", "cancel", "free_job", "free_session"):
        assert stats.succeeded.get(op, 0) > 0, op
    assert elapsed < 30


# 4


_FILE_KEY = ("AKIDFILE", "file-secret")
_ENV_KEY = ("AKIDENV", "env-secret")


def _resolve_case(tmp_path, params, environ):
    cloud = MockCloud(support.catalog(), auth={support.KEY_ID: support.SECRET, _FILE_KEY[0]: _FILE_KEY[1], _ENV_KEY[0]: _ENV_KEY[1]})
    recorder = Recorder(cloud)
    runtime = support.make_runtime(recorder, environ=environ)
    assert d.device_initialize(runtime) is OK
    try:
        status, session = d.session_alloc()
        for key, value in params.items():
            assert d.session_set_parameter(session, key, value) is OK
        status = d.session_init(session)
        if status is not OK:
            return status, None, None
        assert d.session_query_device_property(session, DeviceProperty.NAME)[0] is OK
        scope = re.search(r"Credential=([^/]+)/\d{8}/([^/]+)/", recorder.requests[-1].headers["Authorization"])
        creds = session.backend.credentials
        return status, (session.region, creds.access_key_id, creds.source), scope.groups()
    finally:
        d.device_finalize()


@pytest.mark.criterion(4, "region and credential resolution tables")
def test_criterion_4_resolution(tmp_path, stopwatch):
    endpoints = {
        SessionParameter.CUSTOM_ENDPOINT_BRAKET: support.ENDPOINT,
        SessionParameter.CUSTOM_ENDPOINT_OBJECT_STORE: support.ENDPOINT,
    }
    explicit = {SessionParameter.ACCESS_KEY_ID: support.KEY_ID, SessionParameter.SECRET_ACCESS_KEY: support.SECRET}
    no_file = {"AWS_SHARED_CREDENTIALS_FILE": str(tmp_path / "absent")}

    region_cases = 0
    for arn_region in (True, False):
        for session_default in (True, False):
            for ambient in (True, False):
                params = {SessionParameter.DEVICE_ARN: support.ARN if arn_region else support.SIM_ARN, **explicit, **endpoints}
                if session_default:
                    params[SessionParameter.DEFAULT_REGION] = "eu-west-2"
                environ = dict(no_file, **({"AWS_DEFAULT_REGION": "ap-south-1"} if ambient else {}))
                expected = (
                    "us-east-1" if arn_region else "eu-west-2" if session_default else "ap-south-1" if ambient else None
                )
                status, resolved, scope = _resolve_case(tmp_path, params, environ)
                if expected is None:
                    assert status is StatusCode.ERROR_INVALID_ARGUMENT
                else:
                    assert status is OK and resolved[0] == expected and scope[1] == expected
                region_cases += 1

    creds_file = tmp_path / "credentials"
    creds_file.write_text(f"[default]\naws_access_key_id = {_FILE_KEY[0]}\naws_secret_access_key = {_FILE_KEY[1]}\n")
    credential_cases = 0
    for use_explicit in (True, False):
        for use_file in (True, False):
            for use_env in (True, False):
                params = {SessionParameter.DEVICE_ARN: support.ARN, **endpoints, **(explicit if use_explicit else {})}
                environ = {"AWS_SHARED_CREDENTIALS_FILE": str(creds_file if use_file else tmp_path / "absent")}
                if use_env:
                    environ.update(AWS_ACCESS_KEY_ID=_ENV_KEY[0], AWS_SECRET_ACCESS_KEY=_ENV_KEY[1])
                if use_explicit:
                    expected = (support.KEY_ID, CredentialSource.EXPLICIT)
                elif use_file:
                    expected = (_FILE_KEY[0], CredentialSource.FILE)
                elif use_env:
                    expected = (_ENV_KEY[0], CredentialSource.ENVIRONMENT)
                else:
                    expected = None
                status, resolved, scope = _resolve_case(tmp_path, params, environ)
                if expected is None:
                    assert status is StatusCode.ERROR_PERMISSION_DENIED
                else:
                    assert status is OK and resolved[1:] == expected
                    assert scope[0] == expected[0]  # the service accepted a request signed with that key
                credential_cases += 1
    assert (region_cases, credential_cases) == (8, 8)
    assert stopwatch() < 1


# 5


@pytest.mark.criterion(5, "SigV4 vectors, verifier acceptance and tamper rejection")
def test_criterion_5_signing(stopwatch):
    assert len(v.VECTORS) >= 5
    for name, (method, target, headers, body, token, signed_headers, signature) in v.VECTORS.items():
        creds = Credentials(v.KEY_ID, v.SECRET, token, CredentialSource.EXPLICIT)
        signed = sign_request(creds, HttpRequest(method, v.HOST + target, dict(headers), body), v.REGION, v.SERVICE, v.TIMESTAMP, payload_header=False)
        assert signed.headers["Authorization"] == (
            f"AWS4-HMAC-SHA256 Credential={v.KEY_ID}/20150830/{v.REGION}/{v.SERVICE}/aws4_request, "
            f"SignedHeaders={signed_headers}, Signature={signature}"
        ), name

    cloud = support.make_cloud()
    recorder = Recorder(cloud)
    assert d.device_initialize(support.make_runtime(recorder)) is OK
    session = support.open_session()
    d.session_query_device_property(session, DeviceProperty.STATUS)
    job = support.configured_job(session)
    assert d.job_submit(job) is OK
    assert d.job_wait(job) is OK
    assert d.job_get_results(job)[0] is OK
    other = support.configured_job(session)
    assert d.job_submit(other) is OK and d.job_cancel(other) is OK
    d.device_finalize()

    requests = recorder.requests
    assert {op for op, _, _ in cloud.request_log} >= {"GetDevice", "CreateQuantumTask", "GetQuantumTask", "GetObject", "CancelQuantumTask"}
    assert all(status < 400 for _, _, status in cloud.request_log)
    for request in requests:
        verify(request.method, _target(request.url), request.headers, request.body, cloud.secrets)

    rng = random.Random(5)
    rejected = 0
    for i in range(100):
        request = requests[i % len(requests)]
        auth = request.headers["Authorization"]
        pos = rng.randrange(len(auth))
        replacement = rng.choice([c for c in map(chr, range(33, 127)) if c != auth[pos]])
        headers = dict(request.headers, Authorization=auth[:pos] + replacement + auth[pos + 1:])
        try:
            verify(request.method, _target(request.url), headers, request.body, cloud.secrets)
        except SignatureError:
            rejected += 1
    assert rejected == 100
    assert stopwatch() < 2


# 6


def _within_5_sigma(counts, probabilities, shots):
    for outcome, p in enumerate(probabilities):
        observed = counts.get(outcome, 0)
        sigma = math.sqrt(shots * p * (1 - p))
        if sigma == 0:
            assert observed == round(shots * p)
        else:
            assert abs(observed - shots * p) <= 5 * sigma, (outcome, observed, shots * p)


@pytest.mark.criterion(6, "simulator soundness against the full-matrix oracle")
def test_criterion_6_simulator(stopwatch):
    rng = random.Random(77)
    names = sorted(qasm.GATES)
    assert len(names) == 15
    for name in names:
        for _ in range(10):
            params = (rng.uniform(-10, 10),) if qasm.GATES[name][1] else ()
            u = qasm.gate_matrix(name, params)
            assert np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= 1e-12, name

    for _ in range(200):
        n, source, gates = oracles.random_circuit(rng, max_qubits=4)
        got = qasm.simulate(qasm.parse(source))
        assert np.max(np.abs(got - oracles.naive_statevector(n, gates))) <= 1e-9, source

    shots = 10_000
    for k in range(10):
        n, source, gates = oracles.random_circuit(rng, max_qubits=4, max_gates=12)
        psi = oracles.naive_statevector(n, gates)
        measured = list(range(n - 1, -1, -1))  # top bit is qubit n-1, matching the flat index
        rows = qasm.sample_measurements(qasm.simulate(qasm.parse(source)), measured, shots, seed=1000 + k)
        counts = {}
        for row in rows:
            index = int("".join(map(str, row)), 2)
            counts[index] = counts.get(index, 0) + 1
        _within_5_sigma(counts, np.abs(psi) ** 2, shots)
    assert stopwatch() < 30


# 7


def _cli_session(seed, bell_path):
    cloud = support.make_cloud(seed=seed)
    base = [
        "--device-arn", support.ARN, "--access-key-id", support.KEY_ID, "--secret-access-key", support.SECRET,
        "--endpoint", support.ENDPOINT, "--object-store-endpoint", support.ENDPOINT,
    ]
    transcript = []

    def qdb(*argv):
        out = io.StringIO()
        code = cli.main(list(argv) + base, runtime=support.make_runtime(cloud, seed=seed), environ={}, stdout=out, stderr=io.StringIO())
        transcript.append((code, out.getvalue()))
        return out.getvalue().strip()

    task_id = qdb("submit", bell_path, "--shots", "100", "--bucket", "results")
    cloud.advance(1)
    qdb("status", task_id)
    qdb("wait", task_id)
    qdb("results", task_id)
    qdb("results", task_id, "--format", "json")
    return transcript, dict(cloud.objects)


@pytest.mark.criterion(7, "determinism for a fixed seed")
def test_criterion_7_determinism(tmp_path):
    first, second = _bell_lifecycle(seed=21), _bell_lifecycle(seed=21)
    assert first.result_documents and first.result_documents == second.result_documents
    assert first.counts == second.counts
    assert _bell_lifecycle(seed=22).result_documents != first.result_documents

    bell = tmp_path / "bell.qasm"
    bell.write_text(support.BELL, encoding="utf-8")
    transcript_a, docs_a = _cli_session(21, str(bell))
    transcript_b, docs_b = _cli_session(21, str(bell))
    assert [code for code, _ in transcript_a] == [0] * 5
    assert transcript_a == transcript_b
    assert docs_a == docs_b
    assert sum(json.loads(transcript_a[-1][1])["counts"].values()) == 100


# 8


@pytest.mark.criterion(8, "terminal absorption and result cache")
def test_criterion_8_absorption():
    cloud = support.make_cloud()
    assert d.device_initialize(support.make_runtime(cloud)) is OK
    try:
        job = support.configured_job(support.open_session())
        assert d.job_submit(job) is OK
        assert d.job_wait(job) is OK and job.cached_status is JobStatus.DONE
        before = cloud.total_requests()
        for _ in range(100):
            assert d.job_check(job) == (OK, JobStatus.DONE, None)
        assert cloud.total_requests() == before
        # the first result call is the single object fetch; everything after is cached
        status, histogram = d.job_get_results(job)
        assert status is OK and cloud.request_counts["GetObject"] == 1
        before = cloud.total_requests()
        for _ in range(100):
            assert d.job_check(job) == (OK, JobStatus.DONE, None)
            assert d.job_get_results(job) == (OK, histogram)
        assert cloud.total_requests() == before
    finally:
        d.device_finalize()
