import numpy as np
import pytest

from causalscope.core.dataset import Dataset
from causalscope.core.features import select_features
from causalscope.errors import DataError


def _labeled_dataset():
    rng = np.random.default_rng(5)
    n = 200
    label = np.array(["fault" if i % 4 == 0 else "" for i in range(n)])
    ind = (label == "fault").astype(float)
    hot = 3.0 * ind + 0.01 * rng.standard_normal(n)
    cold = rng.standard_normal(n)
    flat = np.full(n, 2.0)
    wide = rng.uniform(0, 10, n)
    return Dataset(
        variables=("hot", "cold", "flat", "wide"),
        values=np.column_stack([hot, cold, flat, wide]),
        anomaly_label=tuple(label),
    )


def test_manual_selection_preserves_order():
    d = _labeled_dataset()
    sel = select_features(d, method="manual", names=["wide", "hot"])
    assert sel.method == "manual"
    assert sel.selected == ("wide", "hot")


def test_manual_rejects_unknown_and_duplicates():
    d = _labeled_dataset()
    with pytest.raises(DataError):
        select_features(d, method="manual", names=["hot", "hot"])
    with pytest.raises(DataError):
        select_features(d, method="manual", names=["missing"])


def test_correlation_rank_puts_label_aligned_variable_first():
    d = _labeled_dataset()
    sel = select_features(d, method="correlation_rank", k=2)
    assert sel.selected[0] == "hot"
    # constant column carries no signal -> score 0, ranks last
    assert sel.scores["flat"] == 0.0


def test_variance_rank_uses_scaled_variance():
    d = _labeled_dataset()
    sel = select_features(d, method="variance_rank", k=4)
    assert set(sel.selected) == {"hot", "cold", "flat", "wide"}
    assert sel.scores["flat"] == 0.0
    # min-max scaling makes scores comparable across units
    assert all(0.0 <= s <= 1.0 for s in sel.scores.values())


def test_k_bounds_checked():
    d = _labeled_dataset()
    with pytest.raises(DataError):
        select_features(d, method="variance_rank", k=0)
    with pytest.raises(DataError):
        select_features(d, method="variance_rank", k=99)
    with pytest.raises(DataError):
        select_features(d, method="no_such_method", k=1)


def test_to_dict_shape():
    d = _labeled_dataset()
    out = select_features(d, method="correlation_rank", k=3).to_dict()
    assert out["method"] == "correlation_rank"
    assert len(out["selected"]) == 3
    assert set(out["scores"]) == {"hot", "cold", "flat", "wide"}
