import pytest
from hypothesis import given
from hypothesis import strategies as st

from braket_qdmi.braket import BraketDeviceStatus, BraketTaskStatus, map_device_status, map_task_status
from braket_qdmi.braket.status import DEFAULT_QUEUE_THRESHOLD
from braket_qdmi.enums import DeviceStatus, JobStatus
from braket_qdmi.errors import StatusCode, UnexpectedStatusError


@pytest.mark.parametrize(
    "wire, expected",
    [
        ("CREATED", JobStatus.CREATED),
        ("QUEUED", JobStatus.QUEUED),
        ("RUNNING", JobStatus.RUNNING),
        ("COMPLETED", JobStatus.DONE),
        ("FAILED", JobStatus.FAILED),
        ("CANCELLED", JobStatus.CANCELED),
        ("CANCELLING", JobStatus.RUNNING),
    ],
)
def test_task_status_table(wire, expected):
    assert map_task_status(BraketTaskStatus.parse(wire)) is expected


def test_not_set_task_status_is_fatal():
    with pytest.raises(UnexpectedStatusError) as info:
        map_task_status(BraketTaskStatus.NOT_SET)
    assert info.value.status is StatusCode.ERROR_FATAL


@given(st.text())
def test_unknown_wire_strings_parse_to_not_set(text):
    known = {s.value for s in BraketTaskStatus}
    if text not in known:
        assert BraketTaskStatus.parse(text) is BraketTaskStatus.NOT_SET
    if text not in {s.value for s in BraketDeviceStatus}:
        assert BraketDeviceStatus.parse(text) is BraketDeviceStatus.NOT_SET


def test_task_map_is_injective_on_terminal_states():
    terminal = [s for s in BraketTaskStatus if s.is_terminal]
    mapped = [map_task_status(s) for s in terminal]
    assert len(set(mapped)) == len(mapped)
    assert all(m.is_terminal for m in mapped)


@pytest.mark.parametrize(
    "status, depth, threshold, expected",
    [
        (BraketDeviceStatus.ONLINE, 3, 10, DeviceStatus.IDLE),
        (BraketDeviceStatus.ONLINE, 9, 10, DeviceStatus.IDLE),
        (BraketDeviceStatus.ONLINE, 10, 10, DeviceStatus.BUSY),
        (BraketDeviceStatus.ONLINE, 0, 1, DeviceStatus.IDLE),
        (BraketDeviceStatus.ONLINE, 1, 1, DeviceStatus.BUSY),
        (BraketDeviceStatus.OFFLINE, 0, 10, DeviceStatus.MAINTENANCE),
        (BraketDeviceStatus.RETIRED, 0, 10, DeviceStatus.OFFLINE),
        (BraketDeviceStatus.NOT_SET, 0, 10, DeviceStatus.ERROR),
    ],
)
def test_device_status_table(status, depth, threshold, expected):
    assert map_device_status(status, depth, threshold) is expected


def test_default_threshold_is_ten():
    assert DEFAULT_QUEUE_THRESHOLD == 10
    assert map_device_status(BraketDeviceStatus.ONLINE, 9) is DeviceStatus.IDLE
    assert map_device_status(BraketDeviceStatus.ONLINE, 10) is DeviceStatus.BUSY


@given(st.integers(1, 1000), st.lists(st.integers(0, 2000), min_size=2, max_size=30))
def test_online_mapping_is_monotone_in_depth(threshold, depths):
    seen_busy = False
    for depth in sorted(depths):
        status = map_device_status(BraketDeviceStatus.ONLINE, depth, threshold)
        assert status in (DeviceStatus.IDLE, DeviceStatus.BUSY)
        if seen_busy:
            assert status is DeviceStatus.BUSY
        seen_busy = status is DeviceStatus.BUSY


@given(st.sampled_from(list(BraketDeviceStatus)), st.integers(0, 10**6), st.integers(1, 10**6))
def test_device_mapping_is_total(status, depth, threshold):
    assert isinstance(map_device_status(status, depth, threshold), DeviceStatus)
