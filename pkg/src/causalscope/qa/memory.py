"""Session memory: episodic events, semantic annotations, user preferences.

Episodic records append to a JSON-lines file and are never rewritten;
semantic and procedural records live in small JSON documents.  Timestamps
come from an injectable clock so tests and replays are deterministic, and
a clock that moves backwards within a session is treated as an error
rather than silently reordering history.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Callable, Mapping

from causalscope.errors import DataError

KIND_EPISODIC = "episodic"
KIND_SEMANTIC = "semantic"
KIND_PROCEDURAL = "procedural"
KINDS = (KIND_EPISODIC, KIND_SEMANTIC, KIND_PROCEDURAL)

EPISODIC_FILE = "episodic.jsonl"
SEMANTIC_FILE = "semantic.json"
PROCEDURAL_FILE = "procedural.json"

# Minimal payload schema per kind: field name -> required type.
_SCHEMAS: dict[str, dict[str, type]] = {
    KIND_EPISODIC: {"event": str},
    KIND_SEMANTIC: {"entity": str, "annotation": dict},
    KIND_PROCEDURAL: {"preference": str},
}


@dataclass(frozen=True)
class MemoryRecord:
    kind: str
    timestamp: float
    payload: dict

    def to_dict(self) -> dict:
        return {"kind": self.kind, "timestamp": self.timestamp, "payload": self.payload}


def _validate_payload(kind: str, payload: Mapping) -> dict:
    if kind not in KINDS:
        raise DataError(f"unknown memory kind {kind!r}; expected one of {KINDS}")
    if not isinstance(payload, Mapping):
        raise DataError("memory payload must be a mapping")
    payload = dict(payload)
    for field_name, field_type in _SCHEMAS[kind].items():
        if field_name not in payload:
            raise DataError(f"{kind} memory payload requires {field_name!r}")
        if not isinstance(payload[field_name], field_type):
            raise DataError(
                f"{kind} payload field {field_name!r} must be {field_type.__name__}"
            )
    if kind == KIND_PROCEDURAL and "value" not in payload:
        raise DataError("procedural memory payload requires 'value'")
    try:
        json.dumps(payload)
    except (TypeError, ValueError) as exc:
        raise DataError(f"memory payload must be JSON-serializable: {exc}") from exc
    return payload


class MemoryStore:
    """File-backed store for the three memory kinds.

    ``clock`` supplies timestamps (defaults to time.time); it must never
    run backwards within one store instance.
    """

    def __init__(self, root: str | os.PathLike, clock: Callable[[], float] | None = None):
        import time

        self.root = os.fspath(root)
        os.makedirs(self.root, exist_ok=True)
        self._clock = clock if clock is not None else time.time
        self._last_ts: float | None = None
        self._records: list[MemoryRecord] = []
        self._load()

    def _path(self, filename: str) -> str:
        return os.path.join(self.root, filename)

    def _load(self) -> None:
        ep = self._path(EPISODIC_FILE)
        if os.path.exists(ep):
            with open(ep, "r", encoding="utf-8") as fh:
                for i, line in enumerate(fh):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        entry = json.loads(line)
                    except json.JSONDecodeError as exc:
                        raise DataError(f"corrupt episodic memory line {i + 1}: {exc}") from exc
                    self._records.append(
                        MemoryRecord(
                            kind=KIND_EPISODIC,
                            timestamp=float(entry["timestamp"]),
                            payload=entry["payload"],
                        )
                    )
        for kind, filename in ((KIND_SEMANTIC, SEMANTIC_FILE), (KIND_PROCEDURAL, PROCEDURAL_FILE)):
            path = self._path(filename)
            if not os.path.exists(path):
                continue
            with open(path, "r", encoding="utf-8") as fh:
                try:
                    doc = json.load(fh)
                except json.JSONDecodeError as exc:
                    raise DataError(f"corrupt {kind} memory file: {exc}") from exc
            for entry in doc.get("records", []):
                self._records.append(
                    MemoryRecord(
                        kind=kind,
                        timestamp=float(entry["timestamp"]),
                        payload=entry["payload"],
                    )
                )

    def _persist(self, record: MemoryRecord) -> None:
        if record.kind == KIND_EPISODIC:
            # Append-only: existing lines are never touched.
            with open(self._path(EPISODIC_FILE), "a", encoding="utf-8") as fh:
                fh.write(
                    json.dumps(
                        {"timestamp": record.timestamp, "payload": record.payload},
                        sort_keys=True,
                    )
                    + "\n"
                )
            return
        filename = SEMANTIC_FILE if record.kind == KIND_SEMANTIC else PROCEDURAL_FILE
        records = [
            {"timestamp": r.timestamp, "payload": r.payload}
            for r in self._records
            if r.kind == record.kind
        ]
        with open(self._path(filename), "w", encoding="utf-8") as fh:
            json.dump({"records": records}, fh, sort_keys=True, indent=2)
            fh.write("\n")

    def record(self, kind: str, payload: Mapping) -> MemoryRecord:
        """Validate, timestamp, persist, and return a new record."""
        payload = _validate_payload(kind, payload)
        ts = float(self._clock())
        if self._last_ts is not None and ts < self._last_ts:
            raise DataError(
                f"memory clock moved backwards within a session: {ts} < {self._last_ts}"
            )
        self._last_ts = ts
        rec = MemoryRecord(kind=kind, timestamp=ts, payload=payload)
        self._records.append(rec)
        self._persist(rec)
        return rec

    def recall(
        self,
        kind: str | None = None,
        since: float | None = None,
        until: float | None = None,
        where: Mapping | None = None,
    ) -> list[MemoryRecord]:
        """Records filtered by kind, closed time range, and payload fields
        (subset match), sorted by timestamp with insertion order breaking
        ties."""
        if kind is not None and kind not in KINDS:
            raise DataError(f"unknown memory kind {kind!r}")
        out = []
        for r in self._records:
            if kind is not None and r.kind != kind:
                continue
            if since is not None and r.timestamp < since:
                continue
            if until is not None and r.timestamp > until:
                continue
            if where is not None and any(r.payload.get(k) != v for k, v in where.items()):
                continue
            out.append(r)
        return sorted(out, key=lambda r: r.timestamp)

    def counts(self) -> dict[str, int]:
        out = {k: 0 for k in KINDS}
        for r in self._records:
            out[r.kind] += 1
        return out
