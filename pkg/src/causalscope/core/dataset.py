"""Tabular sensor data: CSV ingestion, validation, and row/column views.

A Dataset is an immutable float matrix plus optional per-row metadata
columns.  Three column names are reserved in CSV input and are pulled out
of the numeric block: ``cycle_state`` (machine cycle label),
``anomaly_label`` (fault annotation, empty or "normal" meaning healthy),
and ``timestamp`` (seconds, must be non-decreasing).
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from causalscope.errors import DataError

CYCLE_COLUMN = "cycle_state"
ANOMALY_COLUMN = "anomaly_label"
TIMESTAMP_COLUMN = "timestamp"
RESERVED_COLUMNS = (CYCLE_COLUMN, ANOMALY_COLUMN, TIMESTAMP_COLUMN)

# Labels that count as healthy when building the anomaly indicator.
NORMAL_LABELS = frozenset({"", "normal"})


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable numeric table with optional cycle/anomaly/timestamp metadata.

    ``values`` has shape (rows, len(variables)).  ``dropped_rows`` counts CSV
    rows discarded during parsing because a numeric cell was malformed or
    non-finite.
    """

    variables: tuple[str, ...]
    values: np.ndarray
    cycle_state: tuple[str, ...] | None = None
    anomaly_label: tuple[str, ...] | None = None
    timestamps: np.ndarray | None = None
    dropped_rows: int = 0
    _index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        names = tuple(str(v) for v in self.variables)
        if not names:
            raise DataError("dataset needs at least one variable")
        if any(not n.strip() for n in names):
            raise DataError("variable names must be non-empty")
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise DataError(f"duplicate variable names: {dupes}")
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] != len(names):
            raise DataError(
                f"values must be 2-D with {len(names)} columns, got shape {values.shape}"
            )
        if values.shape[0] == 0:
            raise DataError("dataset has no rows")
        if not np.all(np.isfinite(values)):
            raise DataError("values must be finite")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "variables", names)
        object.__setattr__(self, "values", values)
        for attr in ("cycle_state", "anomaly_label"):
            labels = getattr(self, attr)
            if labels is not None:
                labels = tuple(str(x) for x in labels)
                if len(labels) != values.shape[0]:
                    raise DataError(f"{attr} length must match row count")
                object.__setattr__(self, attr, labels)
        if self.timestamps is not None:
            ts = np.asarray(self.timestamps, dtype=float)
            if ts.shape != (values.shape[0],):
                raise DataError("timestamps length must match row count")
            if not np.all(np.isfinite(ts)):
                raise DataError("timestamps must be finite")
            if np.any(np.diff(ts) < 0):
                raise DataError("timestamps must be non-decreasing")
            ts = ts.copy()
            ts.setflags(write=False)
            object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise DataError(f"unknown variable {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.index(name)]

    def row_frame(self, i: int) -> dict[str, float]:
        """One row as a variable -> value mapping."""
        if not 0 <= i < self.rows:
            raise DataError(f"row index {i} out of range")
        return {n: float(self.values[i, j]) for j, n in enumerate(self.variables)}

    def anomaly_indicator(self) -> np.ndarray:
        """0/1 vector: 1 where the anomaly label marks a fault."""
        if self.anomaly_label is None:
            raise DataError("dataset has no anomaly_label column")
        return np.array(
            [0.0 if lab.strip().lower() in NORMAL_LABELS else 1.0 for lab in self.anomaly_label]
        )

    def subset(self, variables: Sequence[str]) -> "Dataset":
        """Column subset in the given order; metadata columns are kept."""
        idx = [self.index(v) for v in variables]
        return Dataset(
            variables=tuple(variables),
            values=self.values[:, idx],
            cycle_state=self.cycle_state,
            anomaly_label=self.anomaly_label,
            timestamps=self.timestamps,
            dropped_rows=self.dropped_rows,
        )

    def filter_rows(self, mask: np.ndarray) -> "Dataset":
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (self.rows,):
            raise DataError("row mask length must match row count")
        if not mask.any():
            raise DataError("row filter leaves no rows")
        pick = lambda t: tuple(x for x, m in zip(t, mask) if m) if t is not None else None
        return Dataset(
            variables=self.variables,
            values=self.values[mask],
            cycle_state=pick(self.cycle_state),
            anomaly_label=pick(self.anomaly_label),
            timestamps=self.timestamps[mask] if self.timestamps is not None else None,
            dropped_rows=self.dropped_rows,
        )

    def filter_cycle(self, state: str) -> "Dataset":
        if self.cycle_state is None:
            raise DataError("dataset has no cycle_state column")
        mask = np.array([s == state for s in self.cycle_state])
        if not mask.any():
            raise DataError(f"no rows in cycle state {state!r}")
        return self.filter_rows(mask)

    def normal_only(self) -> "Dataset":
        """Rows whose anomaly label is healthy; all rows if unlabeled."""
        if self.anomaly_label is None:
            return self
        return self.filter_rows(self.anomaly_indicator() == 0.0)

    def to_csv(self) -> str:
        """Serialize back to CSV.  Floats use repr, so a load/to_csv/load
        round trip reproduces values bit for bit."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = list(self.variables)
        if self.cycle_state is not None:
            header.append(CYCLE_COLUMN)
        if self.anomaly_label is not None:
            header.append(ANOMALY_COLUMN)
        if self.timestamps is not None:
            header.append(TIMESTAMP_COLUMN)
        writer.writerow(header)
        for i in range(self.rows):
            row: list[str] = [repr(float(x)) for x in self.values[i]]
            if self.cycle_state is not None:
                row.append(self.cycle_state[i])
            if self.anomaly_label is not None:
                row.append(self.anomaly_label[i])
            if self.timestamps is not None:
                row.append(repr(float(self.timestamps[i])))
            writer.writerow(row)
        return buf.getvalue()


def _decode(source) -> str:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (bytes, bytearray)):
        return bytes(source).decode("utf-8")
    if isinstance(source, str):
        return source
    raise DataError(f"unsupported CSV source type {type(source).__name__}")


def load_dataset(source, delimiter: str = ",") -> Dataset:
    """Parse CSV text or bytes into a Dataset.

    The header row is required.  Reserved columns (cycle_state,
    anomaly_label, timestamp) become metadata; every other column must be
    numeric.  Rows with malformed or non-finite numeric cells are dropped
    and counted in ``dropped_rows`` rather than aborting the load.

    Raises DataError for an empty file, duplicate or blank header names,
    zero usable rows, or decreasing timestamps.
    """
    text = _decode(source)
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty CSV input") from None
    header = [h.strip() for h in header]
    if any(not h for h in header):
        raise DataError("CSV header contains an empty column name")
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise DataError(f"CSV header contains duplicate names: {dupes}")

    meta_pos = {name: header.index(name) for name in RESERVED_COLUMNS if name in header}
    numeric_pos = [i for i, h in enumerate(header) if h not in RESERVED_COLUMNS]
    names = tuple(header[i] for i in numeric_pos)
    if not names:
        raise DataError("CSV has no numeric variable columns")

    rows: list[list[float]] = []
    cycles: list[str] = []
    anomalies: list[str] = []
    stamps: list[float] = []
    dropped = 0
    for raw in reader:
        if not raw or all(not c.strip() for c in raw):
            continue  # blank line, not a data row
        if len(raw) != len(header):
            dropped += 1
            continue
        try:
            vals = [float(raw[i]) for i in numeric_pos]
            ts = float(raw[meta_pos[TIMESTAMP_COLUMN]]) if TIMESTAMP_COLUMN in meta_pos else None
        except ValueError:
            dropped += 1
            continue
        if not all(math.isfinite(v) for v in vals):
            dropped += 1
            continue
        if ts is not None and not math.isfinite(ts):
            dropped += 1
            continue
        rows.append(vals)
        if CYCLE_COLUMN in meta_pos:
            cycles.append(raw[meta_pos[CYCLE_COLUMN]].strip())
        if ANOMALY_COLUMN in meta_pos:
            anomalies.append(raw[meta_pos[ANOMALY_COLUMN]].strip())
        if ts is not None:
            stamps.append(ts)
    if not rows:
        raise DataError("CSV contains no usable data rows")

    return Dataset(
        variables=names,
        values=np.array(rows, dtype=float),
        cycle_state=tuple(cycles) if CYCLE_COLUMN in meta_pos else None,
        anomaly_label=tuple(anomalies) if ANOMALY_COLUMN in meta_pos else None,
        timestamps=np.array(stamps) if TIMESTAMP_COLUMN in meta_pos else None,
        dropped_rows=dropped,
    )


def load_dataset_file(path: str | os.PathLike, delimiter: str = ",") -> Dataset:
    try:
        with open(path, "rb") as fh:
            return load_dataset(fh, delimiter=delimiter)
    except OSError as exc:
        raise DataError(f"cannot read dataset file {path}: {exc}") from exc
