"""Variable selection ahead of structure learning.

Three strategies: an explicit manual list, ranking by absolute correlation
with the anomaly indicator, and ranking by variance after min-max scaling
(so raw sensor magnitudes do not dominate).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from causalscope.core.dataset import Dataset
from causalscope.errors import DataError

METHODS = ("manual", "correlation_rank", "variance_rank")


@dataclass(frozen=True)
class FeatureSelection:
    method: str
    selected: tuple[str, ...]
    scores: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "selected": list(self.selected),
            "scores": {k: float(v) for k, v in self.scores.items()},
        }


def _abs_correlation(x: np.ndarray, y: np.ndarray) -> float:
    # Pearson against a possibly constant vector: define the score as 0
    # instead of propagating the 0/0.
    sx = x.std()
    sy = y.std()
    if sx == 0.0 or sy == 0.0:
        return 0.0
    r = float(np.mean((x - x.mean()) * (y - y.mean())) / (sx * sy))
    return abs(r)


def _scaled_variance(x: np.ndarray) -> float:
    span = float(x.max() - x.min())
    if span == 0.0:
        return 0.0
    scaled = (x - x.min()) / span
    return float(scaled.var())


def select_features(
    d: Dataset,
    method: str = "variance_rank",
    k: int | None = None,
    names: Sequence[str] | None = None,
) -> FeatureSelection:
    """Pick a subset of dataset variables.

    manual: ``names`` is returned unchanged (order preserved); every name
    must exist in the dataset.
    correlation_rank: requires an anomaly_label column; score is the
    absolute correlation between the variable and the 0/1 fault indicator.
    variance_rank: score is the variance of the min-max scaled column.

    For the ranking methods ``k`` picks the top scorers; ties break on the
    variable name so results are reproducible.
    """
    if method not in METHODS:
        raise DataError(f"unknown feature selection method {method!r}; expected one of {METHODS}")

    if method == "manual":
        if not names:
            raise DataError("manual selection requires a non-empty name list")
        for n in names:
            d.index(n)  # raises on unknown variables
        if len(set(names)) != len(names):
            raise DataError("manual selection contains duplicate names")
        return FeatureSelection(method=method, selected=tuple(names), scores={n: 1.0 for n in names})

    if k is None:
        k = d.p
    if not 1 <= k <= d.p:
        raise DataError(f"k must be in 1..{d.p}, got {k}")

    if method == "correlation_rank":
        indicator = d.anomaly_indicator()
        scores = {n: _abs_correlation(d.column(n), indicator) for n in d.variables}
    else:
        scores = {n: _scaled_variance(d.column(n)) for n in d.variables}

    ranked = sorted(scores, key=lambda n: (-scores[n], n))
    return FeatureSelection(method=method, selected=tuple(ranked[:k]), scores=scores)
