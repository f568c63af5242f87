"""Row-by-row dataset replay with server-sent events.

A replay session walks a dataset at a fixed rate, appending one event per
row to an in-memory buffer.  Subscribers iterate the buffer by index, so a
subscriber that connects late still sees every event, in order, exactly
once.  Pacing uses absolute scheduling (start + k/rate) so sleep jitter
does not accumulate.  Event payloads are derived only from the dataset and
the (fixed) tolerance bands, never the server wall clock, which keeps
streams reproducible.
"""

from __future__ import annotations

import json
import threading
import time
from typing import Iterator

from causalscope.core.dataset import Dataset
from causalscope.errors import DataError
from causalscope.rca.tolerance import ToleranceSpec, detect_deviations

STATUS_RUNNING = "running"
STATUS_COMPLETE = "complete"
STATUS_STOPPED = "stopped"

DEFAULT_RATE_HZ = 1.95


def _canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


class ReplaySession:
    """One replay run: buffered events plus completion state."""

    def __init__(
        self,
        session_id: str,
        dataset_id: str,
        dataset: Dataset,
        rate: float,
        limit: int | None,
        tolerances: ToleranceSpec | None = None,
    ):
        if rate <= 0.0:
            raise DataError("replay rate must be positive")
        if limit is not None and limit < 1:
            raise DataError("replay limit must be at least 1")
        self.session_id = session_id
        self.dataset_id = dataset_id
        self.dataset = dataset
        self.tolerances = tolerances
        self.rate = float(rate)
        self.rows = dataset.rows if limit is None else min(limit, dataset.rows)
        self.status = STATUS_RUNNING
        self.events: list[dict] = []
        self._cond = threading.Condition()
        self._stop_requested = False
        self._thread: threading.Thread | None = None

    # -- producer side ---------------------------------------------------

    def _append(self, event: dict) -> None:
        with self._cond:
            self.events.append(event)
            self._cond.notify_all()

    def _finish(self, status: str, rows_sent: int) -> None:
        with self._cond:
            self.status = status
            self.events.append(
                {
                    "event": "end",
                    "session_id": self.session_id,
                    "reason": status,
                    "rows_sent": rows_sent,
                }
            )
            self._cond.notify_all()

    def _row_event(self, k: int) -> dict:
        d = self.dataset
        if d.timestamps is not None:
            ts = float(d.timestamps[k])
        else:
            ts = k / self.rate  # synthetic clock derived from the rate
        values = {n: float(d.values[k, j]) for j, n in enumerate(d.variables)}
        event = {
            "event": "row",
            "session_id": self.session_id,
            "index": k,
            "timestamp": ts,
            "values": values,
        }
        state = d.cycle_state[k] if d.cycle_state is not None else None
        if state is not None:
            event["cycle_state"] = state
        if d.anomaly_label is not None:
            event["anomaly_label"] = d.anomaly_label[k]
        if self.tolerances is not None:
            # Live deviation scoring rides on the event so consumers never
            # re-derive band arithmetic on their side.
            event["deviations"] = detect_deviations(
                values, self.tolerances, cycle_state=state
            ).to_dict()
        return event

    def _run(self) -> None:
        self._append(
            {
                "event": "handshake",
                "session_id": self.session_id,
                "dataset_id": self.dataset_id,
                "rows": self.rows,
                "rate": self.rate,
            }
        )
        start = time.monotonic()
        sent = 0
        for k in range(self.rows):
            if self._stop_requested:
                self._finish(STATUS_STOPPED, sent)
                return
            # Absolute schedule: row k goes out at start + k / rate.
            delay = start + k / self.rate - time.monotonic()
            if delay > 0:
                time.sleep(delay)
            if self._stop_requested:
                self._finish(STATUS_STOPPED, sent)
                return
            self._append(self._row_event(k))
            sent += 1
        self._finish(STATUS_COMPLETE, sent)

    def start(self) -> None:
        self._thread = threading.Thread(target=self._run, name=f"replay-{self.session_id}", daemon=True)
        self._thread.start()

    def stop(self) -> str:
        """Request a stop and wait for the worker to finish; the terminal
        event is guaranteed to be buffered before this returns."""
        self._stop_requested = True
        if self._thread is not None:
            self._thread.join()
        return self.status

    @property
    def finished(self) -> bool:
        return self.status != STATUS_RUNNING

    # -- consumer side ---------------------------------------------------

    def iter_events(self, poll_timeout: float = 1.0) -> Iterator[dict]:
        """Yield buffered events from the beginning, then follow the buffer
        until the terminal event."""
        i = 0
        while True:
            with self._cond:
                while i >= len(self.events):
                    if self.status != STATUS_RUNNING:
                        return
                    self._cond.wait(timeout=poll_timeout)
                event = self.events[i]
            i += 1
            yield event
            if event.get("event") == "end":
                return

    def sse_stream(self) -> Iterator[str]:
        """The same events framed for an SSE response."""
        for event in self.iter_events():
            yield f"event: {event['event']}\ndata: {_canonical(event)}\n\n"
