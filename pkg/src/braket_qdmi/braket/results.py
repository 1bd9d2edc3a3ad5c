"""Result documents: parsing the stored JSON into a histogram."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass

from braket_qdmi.errors import FatalError


class MalformedResultError(FatalError):
    pass


@dataclass(frozen=True)
class ResultHistogram:
    counts: dict[str, int]
    shots: int
    measured_qubits: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "counts": dict(sorted(self.counts.items())),
            "shots": self.shots,
            "measuredQubits": list(self.measured_qubits),
        }


def parse_result_document(data: bytes) -> ResultHistogram:
    """Aggregate per-shot ``measurements`` rows into counts keyed by bitstring.

    Key bit ``i`` is the outcome of ``measuredQubits[i]`` (leftmost = first listed).
    """
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedResultError(f"result document is not UTF-8 JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedResultError("result document must be a JSON object")
    rows = doc.get("measurements")
    qubits = doc.get("measuredQubits")
    if not isinstance(rows, list) or not isinstance(qubits, list):
        raise MalformedResultError("result document lacks measurements/measuredQubits arrays")
    if not qubits or not all(type(q) is int and q >= 0 for q in qubits) or len(set(qubits)) != len(qubits):
        raise MalformedResultError("measuredQubits must be distinct non-negative integers")
    if not rows:
        raise MalformedResultError("result document holds zero shots")
    width = len(qubits)
    counts: Counter[str] = Counter()
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != width:
            raise MalformedResultError(f"measurement row {i} does not have {width} entries")
        if any(type(bit) is not int or bit not in (0, 1) for bit in row):
            raise MalformedResultError(f"measurement row {i} contains non-binary entries")
        counts["".join(str(bit) for bit in row)] += 1
    return ResultHistogram(dict(counts), len(rows), tuple(qubits))
