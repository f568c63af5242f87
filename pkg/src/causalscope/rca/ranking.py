"""Root-cause candidate ranking.

A candidate for an anomalous target is any causal ancestor (nonzero total
effect on the target).  Its score is |total effect| times the candidate's
own tolerance deviation, so a variable must both influence the target and
itself be out of band to rank highly.  Candidates whose score is zero are
kept, ordered by influence alone, after every positive-score candidate.

A correlation ranking over the same variables is provided as a baseline;
it uses no graph and cannot distinguish causes from effects or from
spuriously correlated siblings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from causalscope.core.dataset import Dataset
from causalscope.core.graph import _pattern_topo_order
from causalscope.effects.total import EffectMatrices
from causalscope.errors import DataError
from causalscope.rca.tolerance import (
    DIRECTION_ABOVE,
    DIRECTION_BELOW,
    DeviationReport,
)

METHOD_CAUSAL = "causal"
METHOD_CORRELATION = "correlation"


@dataclass(frozen=True)
class RcaCandidate:
    variable: str
    score: float
    dev: float
    path_strength: float
    explanation: str

    def to_dict(self) -> dict:
        return {
            "variable": self.variable,
            "score": self.score,
            "dev": self.dev,
            "path_strength": self.path_strength,
            "explanation": self.explanation,
        }


@dataclass(frozen=True, eq=False)
class RcaReport:
    """Ranking outcome.  ``candidates`` is the requested top-k cut;
    ``all_ranked`` keeps the full ordering for drill-down questions."""

    target: str
    k: int
    method: str
    candidates: tuple[RcaCandidate, ...]
    all_ranked: tuple[RcaCandidate, ...]

    def candidate(self, variable: str) -> RcaCandidate | None:
        for c in self.all_ranked:
            if c.variable == variable:
                return c
        return None

    def rank_of(self, variable: str) -> int | None:
        """1-based rank in the full ordering."""
        for i, c in enumerate(self.all_ranked, start=1):
            if c.variable == variable:
                return i
        return None

    def top(self, n: int | None = None) -> tuple[str, ...]:
        n = self.k if n is None else n
        return tuple(c.variable for c in self.all_ranked[:n])

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "k": self.k,
            "method": self.method,
            "candidates": [c.to_dict() for c in self.candidates],
            "all_ranked": [c.to_dict() for c in self.all_ranked],
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def strongest_path(em: EffectMatrices, source: str, target: str) -> list[str] | None:
    """Directed path from source to target maximizing the product of
    absolute edge weights.  None when the target is unreachable."""
    src = em.node_index(source)
    tgt = em.node_index(target)
    if src == tgt:
        return [source]
    order = _pattern_topo_order(em.B != 0.0)
    if order is None:
        raise DataError("strongest path requires an acyclic weight matrix")
    best: dict[int, float] = {src: 1.0}
    prev: dict[int, int] = {}
    for node in order:
        if node not in best:
            continue
        for child in np.flatnonzero(em.B[:, node]):
            child = int(child)
            cand = best[node] * abs(float(em.B[child, node]))
            # Strict improvement keeps the earliest (deterministic) path on
            # exact ties.
            if cand > best.get(child, 0.0):
                best[child] = cand
                prev[child] = node
    if tgt not in best:
        return None
    path = [tgt]
    while path[-1] != src:
        path.append(prev[path[-1]])
    return [em.nodes[i] for i in reversed(path)]


def _describe(candidate: str, entry_dev: float, direction: str | None, path: list[str] | None, tau: float) -> str:
    route = " -> ".join(path) if path else candidate
    if entry_dev > 0.0:
        side = "above" if direction == DIRECTION_ABOVE else "below" if direction == DIRECTION_BELOW else "outside"
        return (
            f"{candidate} is {side} its tolerance band (deviation {entry_dev:.3g}); "
            f"strongest path {route} with total effect {tau:.3g}"
        )
    return (
        f"{candidate} is inside its tolerance band; ranked by influence alone "
        f"(total effect {tau:.3g} along {route})"
    )


def rank_root_causes(
    report: DeviationReport,
    em: EffectMatrices,
    target: str,
    k: int = 3,
) -> RcaReport:
    """Rank causal ancestors of the target by |total effect| * deviation.

    The target itself is never a candidate.  Positive scores sort first
    (descending), then zero-score ancestors by |total effect| descending;
    remaining ties break on the variable name.
    """
    if k < 1:
        raise DataError("k must be at least 1")
    tgt = em.node_index(target)
    if _pattern_topo_order(em.B != 0.0) is None:
        raise DataError("ranking requires an acyclic weight matrix")

    candidates: list[RcaCandidate] = []
    for j, name in enumerate(em.nodes):
        if j == tgt:
            continue
        tau = float(em.T[tgt, j])
        if tau == 0.0:
            continue  # not an ancestor of the target
        entry = report.entries.get(name)
        dev = entry.dev if entry is not None else 0.0
        direction = entry.direction if entry is not None else None
        path = strongest_path(em, name, target)
        candidates.append(
            RcaCandidate(
                variable=name,
                score=abs(tau) * dev,
                dev=dev,
                path_strength=abs(tau),
                explanation=_describe(name, dev, direction, path, tau),
            )
        )

    candidates.sort(key=lambda c: (-c.score, -c.path_strength, c.variable))
    ranked = tuple(candidates)
    return RcaReport(
        target=target,
        k=k,
        method=METHOD_CAUSAL,
        candidates=ranked[:k],
        all_ranked=ranked,
    )


def correlation_baseline(d: Dataset, target: str, k: int = 3) -> RcaReport:
    """Graph-free baseline: rank every other variable by absolute Pearson
    correlation with the target column.  Constant columns score 0."""
    if k < 1:
        raise DataError("k must be at least 1")
    y = d.column(target)
    sy = float(y.std())
    candidates: list[RcaCandidate] = []
    for name in d.variables:
        if name == target:
            continue
        x = d.column(name)
        sx = float(x.std())
        if sx == 0.0 or sy == 0.0:
            r = 0.0
        else:
            r = float(np.mean((x - x.mean()) * (y - y.mean())) / (sx * sy))
        candidates.append(
            RcaCandidate(
                variable=name,
                score=abs(r),
                dev=0.0,
                path_strength=0.0,
                explanation=(
                    f"|correlation| with {target} is {abs(r):.3g}; "
                    "no causal direction implied"
                ),
            )
        )
    candidates.sort(key=lambda c: (-c.score, c.variable))
    ranked = tuple(candidates)
    return RcaReport(
        target=target,
        k=k,
        method=METHOD_CORRELATION,
        candidates=ranked[:k],
        all_ranked=ranked,
    )
