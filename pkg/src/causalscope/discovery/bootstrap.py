"""Edge stability estimation by resampling.

The dataset is resampled with replacement N times at full size; each
replicate gets its own deterministic seed (base seed + replicate index) and
a fresh structure fit.  For every ordered pair observed with an edge at
least once, the recorded weights yield a mean, a population standard
deviation, a stability score s = 1/(1+std), and an appearance frequency.
Filtering keeps pairs that clear both the stability and frequency floors,
then breaks any remaining cycles by dropping the least stable edge on a
cycle until the pattern is acyclic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from causalscope.core.dataset import Dataset
from causalscope.core.graph import CausalGraph, EdgeRecord, _pattern_topo_order, stability_tier
from causalscope.discovery.lingam import DiscoveryConfig, _fit_matrix
from causalscope.errors import DataError, EngineError, NumericalError


@dataclass(frozen=True)
class PairStats:
    """Bootstrap statistics for one ordered pair source -> target.

    ``samples`` lists (replicate index, weight) for every replicate where
    the edge appeared.  ``std`` uses the population divisor (the number of
    recorded samples, not N and not n-1).  ``frequency`` is the appearance
    count over the frequency denominator chosen by the configuration.
    """

    source: str
    target: str
    samples: tuple[tuple[int, float], ...]
    mean: float
    std: float
    stability: float
    frequency: float

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "samples": [[i, w] for i, w in self.samples],
            "mean": self.mean,
            "std": self.std,
            "stability": self.stability,
            "frequency": self.frequency,
        }


@dataclass(frozen=True, eq=False)
class BootstrapSummary:
    nodes: tuple[str, ...]
    n_bootstrap: int
    n_failed: int
    failed_replicates: tuple[int, ...]
    pairs: tuple[PairStats, ...]
    config: DiscoveryConfig
    converged_replicates: int = 0

    def pair(self, source: str, target: str) -> PairStats | None:
        for p in self.pairs:
            if p.source == source and p.target == target:
                return p
        return None

    def to_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "n_bootstrap": self.n_bootstrap,
            "n_failed": self.n_failed,
            "failed_replicates": list(self.failed_replicates),
            "converged_replicates": self.converged_replicates,
            "pairs": [p.to_dict() for p in self.pairs],
            "config": self.config.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def pair_statistics(
    weights: list[float], n_bootstrap: int, n_failed: int = 0, exclude_failed: bool = False
) -> tuple[float, float, float, float]:
    """Mean, population std, stability, and frequency for one pair's
    recorded weights.  Split out so the arithmetic can be audited directly."""
    if not weights:
        raise DataError("pair statistics need at least one recorded weight")
    m = len(weights)
    mean = sum(weights) / m
    var = sum((w - mean) ** 2 for w in weights) / m
    std = math.sqrt(var)
    stability = 1.0 / (1.0 + std)
    denom = n_bootstrap - n_failed if exclude_failed else n_bootstrap
    if denom <= 0:
        raise DataError("frequency denominator is not positive")
    frequency = m / denom
    return mean, std, stability, frequency


def bootstrap_stability(d: Dataset, cfg: DiscoveryConfig | None = None) -> BootstrapSummary:
    """Run the resampling pass and collect per-pair weight statistics.

    Replicate i draws a full-size with-replacement sample using seed
    ``cfg.seed + i`` and fits on it with that same seed.  Replicates that
    raise are recorded as failed and, by default, still count in the
    frequency denominator.
    """
    cfg = cfg or DiscoveryConfig()
    if cfg.method == "diffan":
        raise NotImplementedError("method 'diffan' is reserved but not implemented")
    if d.p < 2:
        raise DataError("discovery needs at least two variables")
    if d.rows < 10 * d.p:
        raise DataError(
            f"discovery needs at least {10 * d.p} rows for {d.p} variables, got {d.rows}"
        )

    n = d.rows
    weights: dict[tuple[int, int], list[tuple[int, float]]] = {}
    failed: list[int] = []
    converged_count = 0
    for i in range(cfg.n_bootstrap):
        rng = np.random.default_rng(cfg.seed + i)
        idx = rng.integers(0, n, size=n)
        sample = d.values[idx]
        try:
            B, converged = _fit_matrix(sample, cfg, cfg.seed + i)
        except (NumericalError, np.linalg.LinAlgError):
            failed.append(i)
            continue
        if converged:
            converged_count += 1
        for tgt, src in zip(*np.nonzero(B)):
            weights.setdefault((int(src), int(tgt)), []).append((i, float(B[tgt, src])))

    if len(failed) == cfg.n_bootstrap:
        raise NumericalError("every bootstrap replicate failed")

    pairs: list[PairStats] = []
    for (src, tgt), samples in weights.items():
        mean, std, stability, frequency = pair_statistics(
            [w for _, w in samples],
            cfg.n_bootstrap,
            n_failed=len(failed),
            exclude_failed=cfg.exclude_failed_from_frequency,
        )
        pairs.append(
            PairStats(
                source=d.variables[src],
                target=d.variables[tgt],
                samples=tuple(samples),
                mean=mean,
                std=std,
                stability=stability,
                frequency=frequency,
            )
        )
    pairs.sort(key=lambda p: (p.source, p.target))
    return BootstrapSummary(
        nodes=d.variables,
        n_bootstrap=cfg.n_bootstrap,
        n_failed=len(failed),
        failed_replicates=tuple(failed),
        pairs=tuple(pairs),
        config=cfg,
        converged_replicates=converged_count,
    )


def _edges_on_cycles(
    edges: dict[tuple[int, int], PairStats], p: int
) -> list[tuple[int, int]]:
    """Edges (src, tgt) whose target can reach their source, i.e. edges
    lying on at least one directed cycle."""
    adj: dict[int, list[int]] = {i: [] for i in range(p)}
    for src, tgt in edges:
        adj[src].append(tgt)
    out: list[tuple[int, int]] = []
    for src, tgt in edges:
        seen = {tgt}
        stack = [tgt]
        while stack:
            u = stack.pop()
            if u == src:
                out.append((src, tgt))
                break
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
    return out


def filter_edges(summary: BootstrapSummary, cfg: DiscoveryConfig | None = None) -> CausalGraph:
    """Build the final graph from bootstrap statistics.

    Keeps pairs with stability >= retention_stability and frequency >=
    retention_frequency, weighting each kept edge by its mean.  If the
    retained pattern is cyclic, repeatedly removes the lowest-stability edge
    that lies on a cycle (ties broken on (source, target)) until acyclic.
    Edge tiers come from the stability bands.
    """
    cfg = cfg or summary.config
    index = {n: i for i, n in enumerate(summary.nodes)}
    retained: dict[tuple[int, int], PairStats] = {}
    for p_stat in summary.pairs:
        if p_stat.stability >= cfg.retention_stability and p_stat.frequency >= cfg.retention_frequency:
            if p_stat.mean == 0.0:
                continue  # mean exactly zero carries no direction
            retained[(index[p_stat.source], index[p_stat.target])] = p_stat

    removed: list[dict] = []
    p = len(summary.nodes)
    while True:
        mask = np.zeros((p, p), dtype=bool)
        for (src, tgt) in retained:
            mask[tgt, src] = True
        if _pattern_topo_order(mask) is not None:
            break
        cyclic = _edges_on_cycles(retained, p)
        if not cyclic:  # pragma: no cover - cyclic pattern always has such edges
            raise EngineError("cycle detected but no edge lies on a cycle")
        key = min(
            cyclic,
            key=lambda e: (
                retained[e].stability,
                retained[e].source,
                retained[e].target,
            ),
        )
        stat = retained.pop(key)
        removed.append(
            {"source": stat.source, "target": stat.target, "stability": stat.stability}
        )

    B = np.zeros((p, p))
    records: dict[tuple[str, str], EdgeRecord] = {}
    for (src, tgt), stat in retained.items():
        B[tgt, src] = stat.mean
        records[(stat.source, stat.target)] = EdgeRecord(
            source=stat.source,
            target=stat.target,
            weight=stat.mean,
            std=stat.std,
            stability=stat.stability,
            frequency=stat.frequency,
            tier=stability_tier(stat.stability),
        )
    provenance = {
        "method": cfg.method,
        "config": cfg.to_dict(),
        "bootstrap": {
            "n_bootstrap": summary.n_bootstrap,
            "n_failed": summary.n_failed,
            "converged_replicates": summary.converged_replicates,
        },
        "filter": {
            "retention_stability": cfg.retention_stability,
            "retention_frequency": cfg.retention_frequency,
            "removed_cycle_edges": removed,
        },
    }
    return CausalGraph.from_matrix(summary.nodes, B, provenance=provenance, records=records)
