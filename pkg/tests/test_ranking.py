"""Root-cause ranking: path search, score ordering, correlation baseline."""

import numpy as np
import pytest

from causalscope.core.dataset import Dataset
from causalscope.effects.total import total_effects
from causalscope.errors import DataError
from causalscope.rca.ranking import (
    correlation_baseline,
    rank_root_causes,
    strongest_path,
)
from causalscope.rca.tolerance import (
    ToleranceBand,
    ToleranceSpec,
    WILDCARD_STATE,
    detect_deviations,
)


def triangle_effects():
    # a -> b (0.8), b -> c (0.5), a -> c direct (0.2)
    B = np.zeros((3, 3))
    B[1, 0] = 0.8
    B[2, 1] = 0.5
    B[2, 0] = 0.2
    return total_effects(B, nodes=("a", "b", "c"))


def unit_bands(names):
    return ToleranceSpec(
        entries={(n, WILDCARD_STATE): ToleranceBand(-1.0, 1.0) for n in names}
    )


def test_strongest_path_maximizes_weight_product():
    em = triangle_effects()
    # |0.8 * 0.5| = 0.4 beats the 0.2 direct edge
    assert strongest_path(em, "a", "c") == ["a", "b", "c"]
    assert strongest_path(em, "a", "b") == ["a", "b"]
    assert strongest_path(em, "c", "a") is None
    # self-paths degenerate to the trivial single-node path
    assert strongest_path(em, "a", "a") == ["a"]


def test_scores_are_total_effect_times_deviation():
    em = triangle_effects()
    report = detect_deviations({"a": 3.0, "b": 0.0, "c": 9.0}, unit_bands("abc"))
    ranked = rank_root_causes(report, em, "c", k=2)
    a = ranked.candidate("a")
    # dev(a) = (3 - 1) / 2 = 1.0; tau(a->c) = 0.8*0.5 + 0.2 = 0.6
    assert a.dev == pytest.approx(1.0)
    assert a.score == pytest.approx(0.6)
    assert ranked.top() == ("a", "b")
    assert ranked.rank_of("a") == 1
    assert ranked.candidate("c") is None


def test_zero_dev_candidates_rank_by_effect_strength():
    em = triangle_effects()
    report = detect_deviations({"a": 0.0, "b": 0.0, "c": 5.0}, unit_bands("abc"))
    ranked = rank_root_causes(report, em, "c", k=3)
    # nothing deviates upstream; order falls back to |tau| descending
    assert ranked.top() == ("a", "b")
    assert all(c.score == 0.0 for c in ranked.all_ranked)


def test_non_ancestors_are_excluded():
    em = triangle_effects()
    report = detect_deviations({"a": 9.0, "b": 0.0, "c": 0.0}, unit_bands("abc"))
    ranked = rank_root_causes(report, em, "b", k=3)
    assert [c.variable for c in ranked.all_ranked] == ["a"]


def test_explanations_name_the_path():
    em = triangle_effects()
    report = detect_deviations({"a": 3.0, "b": 0.0, "c": 9.0}, unit_bands("abc"))
    text = rank_root_causes(report, em, "c", k=1).candidate("a").explanation
    assert "a -> b -> c" in text
    assert "above" in text


def test_k_validation_and_unknown_target():
    em = triangle_effects()
    report = detect_deviations({"a": 0.0}, unit_bands("abc"))
    with pytest.raises(DataError):
        rank_root_causes(report, em, "c", k=0)
    with pytest.raises(DataError):
        rank_root_causes(report, em, "zz", k=1)


def test_correlation_baseline_orders_by_absolute_r():
    rng = np.random.default_rng(8)
    n = 1500
    x = rng.uniform(-1, 1, n)
    strong = 0.95 * x + 0.05 * rng.uniform(-1, 1, n)
    weak = 0.3 * x + 0.7 * rng.uniform(-1, 1, n)
    flat = np.full(n, 4.0)
    d = Dataset(
        variables=("strong", "weak", "flat", "target"),
        values=np.column_stack([strong, weak, flat, x]),
    )
    report = correlation_baseline(d, "target", k=2)
    assert report.method == "correlation"
    assert report.top() == ("strong", "weak")
    assert report.candidate("flat").score == 0.0
    assert "no causal direction implied" in report.candidate("strong").explanation


def test_report_serialization_round_trip_fields():
    em = triangle_effects()
    report = detect_deviations({"a": 3.0, "b": 0.0, "c": 9.0}, unit_bands("abc"))
    out = rank_root_causes(report, em, "c", k=2).to_dict()
    assert out["target"] == "c" and out["k"] == 2
    assert [c["variable"] for c in out["candidates"]] == ["a", "b"]
    assert {"variable", "score", "dev", "path_strength", "explanation"} <= set(
        out["candidates"][0]
    )
