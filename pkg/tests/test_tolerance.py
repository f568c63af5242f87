"""Tolerance bands and deviation scoring."""

import numpy as np
import pytest

from causalscope.core.dataset import Dataset
from causalscope.errors import DataError
from causalscope.rca.tolerance import (
    ToleranceBand,
    ToleranceSpec,
    WILDCARD_STATE,
    detect_deviations,
    fit_tolerances,
)


def test_band_orientation_enforced():
    with pytest.raises(DataError):
        ToleranceBand(lower=2.0, upper=1.0)


def test_fit_uses_healthy_rows_and_three_sigma():
    rng = np.random.default_rng(3)
    col = rng.normal(10.0, 2.0, 5000)
    labels = tuple("fault" if i < 100 else "" for i in range(5000))
    d = Dataset(variables=("t",), values=col.reshape(-1, 1), anomaly_label=labels)
    spec = fit_tolerances(d, n_sigma=3.0)
    band = spec.band_for("t", WILDCARD_STATE)
    healthy = col[100:]
    mu, sd = healthy.mean(), healthy.std()
    assert band.lower == pytest.approx(mu - 3 * sd)
    assert band.upper == pytest.approx(mu + 3 * sd)
    assert band.source == "fitted"


def test_fit_rejects_constant_columns():
    d = Dataset(variables=("t",), values=np.full((50, 1), 7.0))
    with pytest.raises(DataError):
        fit_tolerances(d)


def test_state_specific_band_overrides_wildcard():
    spec = ToleranceSpec(
        entries={
            ("t", WILDCARD_STATE): ToleranceBand(0.0, 10.0),
            ("t", "PRESS"): ToleranceBand(2.0, 4.0),
        }
    )
    assert spec.band_for("t", "PRESS").upper == 4.0
    assert spec.band_for("t", "HEAT").upper == 10.0
    # lookup is the soft variant; band_for raises for missing variables
    assert spec.lookup("missing", "HEAT") is None
    with pytest.raises(DataError):
        spec.band_for("missing", "HEAT")


def test_deviation_is_distance_to_bound_over_width():
    spec = ToleranceSpec(entries={("t", WILDCARD_STATE): ToleranceBand(0.0, 10.0)})
    inside = detect_deviations({"t": 5.0}, spec)
    assert inside.dev("t") == 0.0
    assert not inside.deviating()

    above = detect_deviations({"t": 12.0}, spec)
    assert above.dev("t") == pytest.approx(0.2)
    assert above.entries["t"].direction == "above"

    below = detect_deviations({"t": -5.0}, spec)
    assert below.dev("t") == pytest.approx(0.5)
    assert below.entries["t"].direction == "below"


def test_boundary_values_do_not_deviate():
    spec = ToleranceSpec(entries={("t", WILDCARD_STATE): ToleranceBand(0.0, 10.0)})
    assert detect_deviations({"t": 0.0}, spec).dev("t") == 0.0
    assert detect_deviations({"t": 10.0}, spec).dev("t") == 0.0


def test_unbanded_variables_are_skipped():
    spec = ToleranceSpec(entries={("t", WILDCARD_STATE): ToleranceBand(0.0, 1.0)})
    report = detect_deviations({"t": 0.5, "other": 99.0}, spec)
    assert list(report.entries) == ["t"]


def test_cycle_state_routes_to_the_right_band():
    spec = ToleranceSpec(
        entries={
            ("t", WILDCARD_STATE): ToleranceBand(0.0, 100.0),
            ("t", "PRESS"): ToleranceBand(0.0, 1.0),
        }
    )
    assert detect_deviations({"t": 50.0}, spec).dev("t") == 0.0
    assert detect_deviations({"t": 50.0}, spec, cycle_state="PRESS").dev("t") == 49.0


def test_per_state_fit_and_json_round_trip():
    rng = np.random.default_rng(4)
    vals = np.concatenate([rng.normal(0, 1, 300), rng.normal(50, 1, 300)])
    states = ("A",) * 300 + ("B",) * 300
    d = Dataset(variables=("t",), values=vals.reshape(-1, 1), cycle_state=states)
    spec = fit_tolerances(d, per_state=True)
    assert spec.band_for("t", "A").upper < spec.band_for("t", "B").lower

    back = ToleranceSpec.from_json(spec.to_json())
    assert back.to_dict() == spec.to_dict()
