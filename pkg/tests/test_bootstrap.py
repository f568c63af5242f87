"""Bootstrap edge statistics: hand arithmetic, determinism, retention."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causalscope.core.dataset import Dataset
from causalscope.discovery.bootstrap import (
    bootstrap_stability,
    filter_edges,
    pair_statistics,
)
from causalscope.discovery.lingam import DiscoveryConfig
from causalscope.errors import DataError


def test_hand_arithmetic_two_samples():
    # weights {1, 3} over N=4 replicates: mean 2, population std 1,
    # stability 1/(1+1) = 0.5, frequency 2/4
    mean, std, stability, freq = pair_statistics([1.0, 3.0], n_bootstrap=4)
    assert mean == 2.0
    assert std == 1.0
    assert stability == 0.5
    assert freq == 0.5


def test_hand_arithmetic_single_sample():
    mean, std, stability, freq = pair_statistics([0.7], n_bootstrap=10)
    assert (mean, std, stability, freq) == (0.7, 0.0, 1.0, 0.1)


def test_failed_replicates_count_against_frequency_by_default():
    *_, freq = pair_statistics([1.0, 1.0], n_bootstrap=10, n_failed=5)
    assert freq == 0.2
    *_, freq_excl = pair_statistics(
        [1.0, 1.0], n_bootstrap=10, n_failed=5, exclude_failed=True
    )
    assert freq_excl == 0.4


def test_empty_weights_rejected():
    with pytest.raises(DataError):
        pair_statistics([], n_bootstrap=4)
    with pytest.raises(DataError):
        pair_statistics([1.0], n_bootstrap=4, n_failed=4, exclude_failed=True)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(-5, 5), min_size=1, max_size=20),
    st.integers(min_value=20, max_value=200),
)
def test_stability_and_frequency_ranges(weights, n_bootstrap):
    mean, std, stability, freq = pair_statistics(weights, n_bootstrap)
    assert 0.0 < stability <= 1.0
    assert 0.0 < freq <= 1.0
    assert std >= 0.0
    assert min(weights) <= mean <= max(weights)


def _sem(seed=0, n=700):
    rng = np.random.default_rng(seed)
    e = rng.uniform(-1, 1, size=(n, 3))
    x1 = e[:, 0]
    x2 = 0.8 * x1 + 0.3 * e[:, 1]
    x3 = 0.7 * x2 + 0.3 * e[:, 2]
    return Dataset(variables=("x1", "x2", "x3"), values=np.column_stack([x1, x2, x3]))


def test_bootstrap_is_seed_deterministic():
    d = _sem()
    cfg = DiscoveryConfig(seed=5, n_bootstrap=6)
    s1 = bootstrap_stability(d, cfg)
    s2 = bootstrap_stability(d, cfg)
    assert s1.to_json() == s2.to_json()
    assert s1.n_bootstrap == 6


def test_bootstrap_recovers_chain_and_filters():
    d = _sem()
    cfg = DiscoveryConfig(seed=5, n_bootstrap=10)
    summary = bootstrap_stability(d, cfg)
    g = filter_edges(summary, cfg)
    got = {(e.source, e.target) for e in g.edges}
    assert {("x1", "x2"), ("x2", "x3")} <= got
    fwd = summary.pair("x1", "x2")
    assert fwd is not None and fwd.frequency >= 0.5
    for e in g.edges:
        assert e.stability >= cfg.retention_stability
        assert e.frequency >= cfg.retention_frequency
        assert e.tier in {"very strong", "reliable", "moderately stable"}


def test_filter_provenance_records_pipeline():
    d = _sem()
    cfg = DiscoveryConfig(seed=5, n_bootstrap=4)
    g = filter_edges(bootstrap_stability(d, cfg), cfg)
    prov = g.provenance
    assert prov["method"] == "lingam"
    assert prov["bootstrap"]["n_bootstrap"] == 4
    assert "filter" in prov and "removed_cycle_edges" in prov["filter"]


def test_retention_floors_drop_everything_when_strict():
    d = _sem()
    cfg = DiscoveryConfig(seed=5, n_bootstrap=4, retention_stability=0.999999)
    g = filter_edges(bootstrap_stability(d, cfg), cfg)
    assert g.edges == ()
    assert g.nodes == ("x1", "x2", "x3")
