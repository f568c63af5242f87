"""Observational cross-check of predicted intervention shifts.

For a source/target pair the predicted shift (a2 - a1) * tau is compared
with the observed difference in target means between rows where the source
sits near each level.  Large disagreement flags likely model
misspecification, for example an unobserved confounder inflating tau.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from causalscope.core.dataset import Dataset
from causalscope.effects.total import EffectMatrices, default_levels
from causalscope.errors import DataError

VERDICT_SUPPORTED = "supported"
VERDICT_SUSPECT = "suspect"
VERDICT_INSUFFICIENT = "insufficient data"

INTERPRETATION_SUPPORTED = "Causal effect from {source} to {target} is well-supported by data"
INTERPRETATION_SUSPECT = "Possible misspecification or unobserved confounding"
INTERPRETATION_INSUFFICIENT = "Too few rows near one or both source levels"

CSV_COLUMNS = (
    "A",
    "B",
    "tau",
    "delta_pred",
    "delta_obs",
    "error",
    "verdict",
    "n_baseline",
    "n_counterfactual",
)


@dataclass(frozen=True)
class CounterfactualSpec:
    """One requested check.  Levels left as None fall back to the source's
    first and third quartiles; epsilon falls back to 0.25 * std(source)."""

    source: str
    target: str
    a1: float | None = None
    a2: float | None = None
    epsilon: float | None = None

    def __post_init__(self) -> None:
        if self.source == self.target:
            raise DataError("source and target must differ")
        if self.epsilon is not None and self.epsilon <= 0.0:
            raise DataError("epsilon must be positive")
        if self.a1 is not None and self.a2 is not None and self.a1 == self.a2:
            raise DataError("intervention levels must differ")


@dataclass(frozen=True)
class CounterfactualResult:
    source: str
    target: str
    tau: float
    a1: float | None
    a2: float | None
    delta_pred: float | None
    delta_obs: float | None
    error: float | None
    n_baseline: int
    n_counterfactual: int
    verdict: str
    interpretation: str

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "tau": self.tau,
            "a1": self.a1,
            "a2": self.a2,
            "delta_pred": self.delta_pred,
            "delta_obs": self.delta_obs,
            "error": self.error,
            "n_baseline": self.n_baseline,
            "n_counterfactual": self.n_counterfactual,
            "verdict": self.verdict,
            "interpretation": self.interpretation,
        }


def _check_pair(
    d: Dataset,
    em: EffectMatrices,
    spec: CounterfactualSpec,
    rel_tol: float,
    std_tol: float,
) -> CounterfactualResult:
    tau = em.tau(spec.source, spec.target)
    src_col = d.column(spec.source)
    tgt_col = d.column(spec.target)

    if spec.a1 is None or spec.a2 is None:
        try:
            q1, q3 = default_levels(d, spec.source)
        except DataError:
            return CounterfactualResult(
                source=spec.source,
                target=spec.target,
                tau=tau,
                a1=spec.a1,
                a2=spec.a2,
                delta_pred=None,
                delta_obs=None,
                error=None,
                n_baseline=0,
                n_counterfactual=0,
                verdict=VERDICT_INSUFFICIENT,
                interpretation=INTERPRETATION_INSUFFICIENT,
            )
        a1 = q1 if spec.a1 is None else spec.a1
        a2 = q3 if spec.a2 is None else spec.a2
    else:
        a1, a2 = spec.a1, spec.a2

    eps = spec.epsilon if spec.epsilon is not None else 0.25 * float(src_col.std())
    base_mask = np.abs(src_col - a1) <= eps
    cf_mask = np.abs(src_col - a2) <= eps
    n_base = int(base_mask.sum())
    n_cf = int(cf_mask.sum())
    delta_pred = (a2 - a1) * tau

    if n_base == 0 or n_cf == 0:
        return CounterfactualResult(
            source=spec.source,
            target=spec.target,
            tau=tau,
            a1=a1,
            a2=a2,
            delta_pred=delta_pred,
            delta_obs=None,
            error=None,
            n_baseline=n_base,
            n_counterfactual=n_cf,
            verdict=VERDICT_INSUFFICIENT,
            interpretation=INTERPRETATION_INSUFFICIENT,
        )

    delta_obs = float(tgt_col[cf_mask].mean() - tgt_col[base_mask].mean())
    error = abs(delta_pred - delta_obs)
    threshold = max(rel_tol * abs(delta_pred), std_tol * float(tgt_col.std()))
    if error <= threshold:
        verdict = VERDICT_SUPPORTED
        interpretation = INTERPRETATION_SUPPORTED.format(source=spec.source, target=spec.target)
    else:
        verdict = VERDICT_SUSPECT
        interpretation = INTERPRETATION_SUSPECT
    return CounterfactualResult(
        source=spec.source,
        target=spec.target,
        tau=tau,
        a1=a1,
        a2=a2,
        delta_pred=delta_pred,
        delta_obs=delta_obs,
        error=error,
        n_baseline=n_base,
        n_counterfactual=n_cf,
        verdict=verdict,
        interpretation=interpretation,
    )


def counterfactual_validate(
    d: Dataset,
    em: EffectMatrices,
    specs: Iterable[CounterfactualSpec] | None = None,
    delta: float = 0.05,
    rel_tol: float = 0.1,
    std_tol: float = 0.05,
) -> list[CounterfactualResult]:
    """Validate predicted effects against observed group differences.

    With explicit specs, each is checked as requested.  Without specs,
    every ordered pair whose |tau| exceeds ``delta`` is swept with default
    levels.  A pair where either group is empty (or the source has a
    degenerate interquartile range) yields an "insufficient data" result
    rather than an error.  The verdict threshold is
    max(rel_tol * |delta_pred|, std_tol * std(target)).

    Results are sorted by (source, target).
    """
    for name in em.nodes:
        d.index(name)  # graph variables must exist in the dataset
    if specs is None:
        sweep: list[CounterfactualSpec] = []
        for src in em.nodes:
            for tgt in em.nodes:
                if src != tgt and abs(em.tau(src, tgt)) > delta:
                    sweep.append(CounterfactualSpec(source=src, target=tgt))
        specs = sweep
    else:
        specs = list(specs)
        for s in specs:
            em.node_index(s.source)
            em.node_index(s.target)

    results = [_check_pair(d, em, s, rel_tol, std_tol) for s in specs]
    results.sort(key=lambda r: (r.source, r.target))
    return results


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def results_to_csv(results: Sequence[CounterfactualResult]) -> str:
    """Fixed-column CSV report; empty cells mark values that do not exist
    for insufficient-data rows."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in results:
        writer.writerow(
            [
                r.source,
                r.target,
                _cell(r.tau),
                _cell(r.delta_pred),
                _cell(r.delta_obs),
                _cell(r.error),
                r.verdict,
                r.n_baseline,
                r.n_counterfactual,
            ]
        )
    return buf.getvalue()
