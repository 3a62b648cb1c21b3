"""Append-only JSONL run log: one header line, then one record per
true evaluation. Replay tolerates a corrupt trailing line (a run killed
mid-write) but refuses corrupt interior lines."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path


class ReplayError(ValueError):
    """The log cannot be reconstructed (corruption before the last line)."""


@dataclass(frozen=True)
class EvaluationRecord:
    """One true objective evaluation."""

    index: int
    unit: tuple
    raw: tuple
    value: float | None
    status: str
    wall_ms: float
    generation: int
    reason: str | None = None

    def __post_init__(self):
        if self.status not in ("ok", "failed"):
            raise ValueError(f"status must be 'ok' or 'failed', got {self.status!r}")
        if self.status == "ok" and (self.value is None or not _finite(self.value)):
            raise ValueError("an ok record requires a finite value")
        object.__setattr__(self, "unit", tuple(float(u) for u in self.unit))
        object.__setattr__(self, "raw", tuple(self.raw))

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _finite(x) -> bool:
    try:
        return abs(float(x)) < float("inf")
    except (TypeError, ValueError):
        return False


def record_to_dict(record: EvaluationRecord, rng_state=None) -> dict:
    doc = {
        "index": record.index,
        "unit": list(record.unit),
        "raw": list(record.raw),
        "value": record.value,
        "status": record.status,
        "wall_ms": record.wall_ms,
        "generation": record.generation,
    }
    if record.reason is not None:
        doc["reason"] = record.reason
    if rng_state is not None:
        doc["rng_state"] = rng_state
    return doc


def record_from_dict(doc: dict) -> EvaluationRecord:
    return EvaluationRecord(
        index=int(doc["index"]),
        unit=tuple(doc["unit"]),
        raw=tuple(doc["raw"]),
        value=None if doc["value"] is None else float(doc["value"]),
        status=doc["status"],
        wall_ms=float(doc["wall_ms"]),
        generation=int(doc["generation"]),
        reason=doc.get("reason"),
    )


class RunLog:
    """Writer half of the log; every line is flushed before returning."""

    def __init__(self, path: str | Path, append: bool = False):
        self.path = Path(path)
        self._fh = open(self.path, "a" if append else "w", encoding="utf-8")

    def write_header(self, header: dict) -> None:
        self._write(header)

    def append(self, record: EvaluationRecord, rng_state=None) -> None:
        self._write(record_to_dict(record, rng_state))

    def _write(self, doc: dict) -> None:
        self._fh.write(json.dumps(doc) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_log(path: str | Path) -> tuple[dict | None, list[EvaluationRecord]]:
    """Parse a run log into (header, records).

    An empty or missing-content file yields (None, []). A corrupt final
    line is dropped with a warning; corruption anywhere else raises
    :class:`ReplayError`.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line for line in fh.read().splitlines() if line.strip()]
    if not lines:
        return None, []

    parsed = []
    for i, line in enumerate(lines):
        try:
            parsed.append(json.loads(line))
        except json.JSONDecodeError as exc:
            if i == len(lines) - 1:
                warnings.warn(f"{path}: dropping corrupt trailing log line")
                break
            raise ReplayError(f"{path}: corrupt log line {i + 1}: {exc}") from exc

    if not parsed:
        return None, []
    header = parsed[0]
    if not isinstance(header, dict) or "space" not in header:
        raise ReplayError(f"{path}: first line is not a run-log header")
    records = []
    for i, doc in enumerate(parsed[1:]):
        try:
            records.append(record_from_dict(doc))
        except (KeyError, TypeError, ValueError) as exc:
            if i == len(parsed) - 2:
                warnings.warn(f"{path}: dropping malformed trailing record")
                break
            raise ReplayError(f"{path}: malformed record on line {i + 2}: {exc}") from exc
    for i, record in enumerate(records):
        if record.index != i:
            raise ReplayError(f"{path}: record indexes are not dense from 0 (saw {record.index} at {i})")
    return header, records
