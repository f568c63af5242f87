"""Tolerance bands and per-row deviation scoring.

A band is an inclusive [lower, upper] interval for a variable, optionally
specific to a machine cycle state; the wildcard state "*" applies whenever
no state-specific entry exists.  Deviation is 0 inside the band and
otherwise the distance to the nearest bound divided by the band width, so
scores are comparable across variables with different physical scales.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from causalscope.core.dataset import Dataset
from causalscope.errors import DataError

WILDCARD_STATE = "*"

DIRECTION_INSIDE = "inside"
DIRECTION_ABOVE = "above"
DIRECTION_BELOW = "below"


@dataclass(frozen=True)
class ToleranceBand:
    lower: float
    upper: float
    source: str = "expert"

    def __post_init__(self) -> None:
        if not self.lower < self.upper:
            raise DataError(f"band lower bound must be below upper, got [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True, eq=False)
class ToleranceSpec:
    """Bands keyed by (variable, cycle state)."""

    entries: Mapping[tuple[str, str], ToleranceBand]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", dict(self.entries))

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(sorted({var for var, _ in self.entries}))

    def lookup(self, variable: str, cycle_state: str | None = None) -> ToleranceBand | None:
        """State-specific entry wins over the wildcard; None when neither
        exists."""
        if cycle_state is not None:
            band = self.entries.get((variable, cycle_state))
            if band is not None:
                return band
        return self.entries.get((variable, WILDCARD_STATE))

    def band_for(self, variable: str, cycle_state: str | None = None) -> ToleranceBand:
        band = self.lookup(variable, cycle_state)
        if band is None:
            raise DataError(f"no tolerance band for {variable!r} in state {cycle_state!r}")
        return band

    def to_dict(self) -> dict:
        out: dict[str, dict[str, dict]] = {}
        for (var, state), band in sorted(self.entries.items()):
            out.setdefault(var, {})[state] = {
                "lower": band.lower,
                "upper": band.upper,
                "source": band.source,
            }
        return out

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, d: Mapping) -> "ToleranceSpec":
        entries: dict[tuple[str, str], ToleranceBand] = {}
        for var, states in d.items():
            if not isinstance(states, Mapping):
                raise DataError(f"tolerance entry for {var!r} must map states to bands")
            for state, band in states.items():
                try:
                    entries[(var, state)] = ToleranceBand(
                        lower=float(band["lower"]),
                        upper=float(band["upper"]),
                        source=str(band.get("source", "expert")),
                    )
                except (KeyError, TypeError, ValueError) as exc:
                    raise DataError(f"invalid band for {var!r}/{state!r}: {exc}") from exc
        return cls(entries=entries)

    @classmethod
    def from_json(cls, text: str | bytes) -> "ToleranceSpec":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid tolerance JSON: {exc}") from exc
        if not isinstance(payload, Mapping):
            raise DataError("tolerance JSON must be an object")
        return cls.from_dict(payload)


def fit_tolerances(d: Dataset, n_sigma: float = 3.0, per_state: bool = False) -> ToleranceSpec:
    """Fit mean +/- n_sigma bands from (presumed healthy) data.

    Always produces a wildcard band per variable; with ``per_state`` also
    one band per observed cycle state.  Constant columns are rejected since
    a zero-width band cannot score deviations.
    """
    if n_sigma <= 0.0:
        raise DataError("n_sigma must be positive")
    healthy = d.normal_only()
    entries: dict[tuple[str, str], ToleranceBand] = {}

    def fit_one(values: np.ndarray, var: str, state: str) -> None:
        mu = float(values.mean())
        sd = float(values.std())
        if sd == 0.0:
            raise DataError(f"cannot fit a band for constant column {var!r}")
        entries[(var, state)] = ToleranceBand(
            lower=mu - n_sigma * sd, upper=mu + n_sigma * sd, source="fitted"
        )

    for var in healthy.variables:
        fit_one(healthy.column(var), var, WILDCARD_STATE)
    if per_state:
        if healthy.cycle_state is None:
            raise DataError("per-state fitting requires a cycle_state column")
        for state in sorted(set(healthy.cycle_state)):
            sub = healthy.filter_cycle(state)
            for var in sub.variables:
                fit_one(sub.column(var), var, state)
    return ToleranceSpec(entries=entries)


@dataclass(frozen=True)
class DeviationEntry:
    variable: str
    value: float
    lower: float
    upper: float
    dev: float
    direction: str


@dataclass(frozen=True, eq=False)
class DeviationReport:
    entries: Mapping[str, DeviationEntry]
    cycle_state: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", dict(self.entries))

    def dev(self, variable: str) -> float:
        try:
            return self.entries[variable].dev
        except KeyError:
            raise DataError(f"no deviation entry for {variable!r}") from None

    def deviating(self) -> tuple[str, ...]:
        return tuple(sorted(v for v, e in self.entries.items() if e.dev > 0.0))

    def to_dict(self) -> dict:
        return {
            "cycle_state": self.cycle_state,
            "entries": {
                v: {
                    "value": e.value,
                    "lower": e.lower,
                    "upper": e.upper,
                    "dev": e.dev,
                    "direction": e.direction,
                }
                for v, e in sorted(self.entries.items())
            },
        }


def detect_deviations(
    frame: Mapping[str, float],
    tol: ToleranceSpec,
    cycle_state: str | None = None,
) -> DeviationReport:
    """Score one observation frame against its tolerance bands.

    dev = 0 inside the band, otherwise distance to the nearest bound over
    the band width.  Variables without an applicable band are skipped.
    """
    entries: dict[str, DeviationEntry] = {}
    for var, value in frame.items():
        band = tol.lookup(var, cycle_state)
        if band is None:
            continue
        value = float(value)
        if value < band.lower:
            dev = (band.lower - value) / band.width
            direction = DIRECTION_BELOW
        elif value > band.upper:
            dev = (value - band.upper) / band.width
            direction = DIRECTION_ABOVE
        else:
            dev = 0.0
            direction = DIRECTION_INSIDE
        entries[var] = DeviationEntry(
            variable=var,
            value=value,
            lower=band.lower,
            upper=band.upper,
            dev=dev,
            direction=direction,
        )
    return DeviationReport(entries=entries, cycle_state=cycle_state)
