"""Session memory persistence: schemas, ordering, recall filters."""

import json

import pytest

from causalscope.errors import DataError
from causalscope.qa.memory import MemoryStore


class Clock:
    def __init__(self, start=100.0):
        self.now = start

    def __call__(self):
        self.now += 1.0
        return self.now


def test_record_and_recall_each_kind(tmp_path):
    store = MemoryStore(tmp_path, clock=Clock())
    store.record("episodic", {"event": "dataset uploaded"})
    store.record("semantic", {"entity": "x3", "annotation": {"unit": "bar"}})
    store.record("procedural", {"preference": "default_k", "value": 5})

    assert store.counts() == {"episodic": 1, "semantic": 1, "procedural": 1}
    ep = store.recall("episodic")
    assert len(ep) == 1 and ep[0].payload["event"] == "dataset uploaded"


def test_payload_schemas_enforced(tmp_path):
    store = MemoryStore(tmp_path, clock=Clock())
    with pytest.raises(DataError):
        store.record("episodic", {})
    with pytest.raises(DataError):
        store.record("episodic", {"event": 7})
    with pytest.raises(DataError):
        store.record("semantic", {"entity": "x1", "annotation": "not a dict"})
    with pytest.raises(DataError):
        store.record("procedural", {"preference": "k"})  # missing value
    with pytest.raises(DataError):
        store.record("unknown_kind", {"event": "x"})


def test_clock_regression_rejected(tmp_path):
    clock = Clock()
    store = MemoryStore(tmp_path, clock=clock)
    store.record("episodic", {"event": "first"})
    clock.now = 0.0  # jump backwards
    with pytest.raises(DataError):
        store.record("episodic", {"event": "second"})


def test_recall_window_and_payload_filter(tmp_path):
    store = MemoryStore(tmp_path, clock=Clock())
    t1 = store.record("episodic", {"event": "a"}).timestamp
    store.record("episodic", {"event": "b"})
    t3 = store.record("episodic", {"event": "c"}).timestamp

    assert [r.payload["event"] for r in store.recall("episodic", since=t1 + 0.5)] == ["b", "c"]
    assert [r.payload["event"] for r in store.recall("episodic", until=t3 - 0.5)] == ["a", "b"]
    assert [r.payload["event"] for r in store.recall("episodic", where={"event": "b"})] == ["b"]
    assert store.recall("semantic") == []


def test_persistence_across_instances(tmp_path):
    clock = Clock()
    store = MemoryStore(tmp_path, clock=clock)
    store.record("episodic", {"event": "survives"})
    store.record("semantic", {"entity": "x1", "annotation": {"note": "ok"}})
    store.record("procedural", {"preference": "style", "value": "terse"})

    reopened = MemoryStore(tmp_path, clock=Clock(start=clock.now + 10))
    assert reopened.counts() == {"episodic": 1, "semantic": 1, "procedural": 1}
    assert reopened.recall("procedural")[0].payload["value"] == "terse"

    # episodic is an append-only jsonl file, one record per line
    lines = (tmp_path / "episodic.jsonl").read_text().strip().splitlines()
    assert len(lines) == 1
    assert json.loads(lines[0])["payload"]["event"] == "survives"
    # structured stores carry a records envelope
    sem = json.loads((tmp_path / "semantic.json").read_text())
    assert isinstance(sem["records"], list)


def test_recall_is_timestamp_sorted(tmp_path):
    store = MemoryStore(tmp_path, clock=Clock())
    for name in ("one", "two", "three"):
        store.record("episodic", {"event": name})
    times = [r.timestamp for r in store.recall("episodic")]
    assert times == sorted(times)
