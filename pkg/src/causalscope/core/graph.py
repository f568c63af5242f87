"""Directed causal graph with per-edge stability metadata.

Convention used across the package: the weight matrix B holds the edge
j -> i at B[i][j], so row i lists the direct causes of variable i.  The
nonzero pattern of B must be acyclic and must match the edge list exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

import numpy as np

from causalscope.errors import DataError

TIER_VERY_STRONG = "very strong"
TIER_RELIABLE = "reliable"
TIER_MODERATE = "moderately stable"
TIER_UNSTABLE = "unstable"
TIER_MANUAL = "manual"


def stability_tier(s: float) -> str:
    """Band a stability score: >=0.9 very strong, >=0.8 reliable,
    >=0.6 moderately stable, below that unstable."""
    if not 0.0 < s <= 1.0:
        raise DataError(f"stability must lie in (0, 1], got {s}")
    if s >= 0.9:
        return TIER_VERY_STRONG
    if s >= 0.8:
        return TIER_RELIABLE
    if s >= 0.6:
        return TIER_MODERATE
    return TIER_UNSTABLE


@dataclass(frozen=True)
class EdgeRecord:
    """One directed edge source -> target.

    The stability fields are None for edges that never went through the
    bootstrap (single fits, operator-added edges).  When std is present,
    stability must equal 1 / (1 + std).
    """

    source: str
    target: str
    weight: float
    std: float | None = None
    stability: float | None = None
    frequency: float | None = None
    tier: str | None = None

    def __post_init__(self) -> None:
        if self.source == self.target:
            raise DataError(f"self loop on {self.source!r}")
        if self.weight == 0.0:
            raise DataError(f"edge {self.source}->{self.target} has zero weight")
        if self.stability is not None:
            if not 0.0 < self.stability <= 1.0:
                raise DataError("stability must lie in (0, 1]")
            if self.std is None:
                raise DataError("stability given without std")
            if self.stability != 1.0 / (1.0 + self.std):
                raise DataError("stability must equal 1/(1+std)")
        if self.frequency is not None and not 0.0 <= self.frequency <= 1.0:
            raise DataError("frequency must lie in [0, 1]")
        if self.tier is not None and self.tier != TIER_MANUAL:
            if self.stability is None:
                raise DataError("banded tier requires a stability score")
            expected = stability_tier(self.stability)
            if self.tier != expected:
                raise DataError(f"tier {self.tier!r} does not match stability {self.stability}")

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "weight": float(self.weight),
            "std": None if self.std is None else float(self.std),
            "stability": None if self.stability is None else float(self.stability),
            "frequency": None if self.frequency is None else float(self.frequency),
            "tier": self.tier,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "EdgeRecord":
        return cls(
            source=d["source"],
            target=d["target"],
            weight=float(d["weight"]),
            std=d.get("std"),
            stability=d.get("stability"),
            frequency=d.get("frequency"),
            tier=d.get("tier"),
        )


@dataclass(frozen=True)
class AcyclicityCheck:
    """Result of a cycle test: a topological order when acyclic, otherwise
    one offending cycle as a node sequence (first node repeated at the end)."""

    order: tuple[str, ...] | None
    cycle: tuple[str, ...] | None

    @property
    def is_acyclic(self) -> bool:
        return self.order is not None


def _pattern_topo_order(mask: np.ndarray) -> list[int] | None:
    """Kahn's algorithm on the column->row edge pattern.  Always removes the
    smallest eligible index first, so the order is deterministic.  Returns
    None when a cycle blocks completion."""
    p = mask.shape[0]
    indeg = [int(mask[i].sum()) for i in range(p)]
    ready = sorted(i for i in range(p) if indeg[i] == 0)
    order: list[int] = []
    while ready:
        n = ready.pop(0)
        order.append(n)
        changed = False
        for child in range(p):
            if mask[child, n]:
                indeg[child] -= 1
                if indeg[child] == 0:
                    ready.append(child)
                    changed = True
        if changed:
            ready.sort()
    return order if len(order) == p else None


def _find_cycle(mask: np.ndarray, names: tuple[str, ...]) -> tuple[str, ...]:
    """Extract one directed cycle from a pattern known to be cyclic."""
    p = mask.shape[0]
    color = [0] * p  # 0 unvisited, 1 on stack, 2 done
    stack: list[int] = []

    def dfs(u: int) -> tuple[str, ...] | None:
        color[u] = 1
        stack.append(u)
        for v in range(p):
            if mask[v, u]:  # edge u -> v
                if color[v] == 1:
                    start = stack.index(v)
                    loop = stack[start:] + [v]
                    return tuple(names[i] for i in loop)
                if color[v] == 0:
                    found = dfs(v)
                    if found is not None:
                        return found
        color[u] = 2
        stack.pop()
        return None

    for u in range(p):
        if color[u] == 0:
            found = dfs(u)
            if found is not None:
                return found
    raise DataError("no cycle found in pattern")  # pragma: no cover


@dataclass(frozen=True, eq=False)
class CausalGraph:
    """Weighted DAG over named variables.

    ``B`` is the (p, p) weight matrix with B[i][j] the direct effect of
    node j on node i; ``edges`` mirrors its nonzero pattern with stability
    metadata attached; ``provenance`` records how the graph was produced
    (method, configuration, applied edits).
    """

    nodes: tuple[str, ...]
    B: np.ndarray
    edges: tuple[EdgeRecord, ...] = ()
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        names = tuple(str(n) for n in self.nodes)
        if not names:
            raise DataError("graph needs at least one node")
        if len(set(names)) != len(names):
            raise DataError("duplicate node names")
        B = np.asarray(self.B, dtype=float)
        p = len(names)
        if B.shape != (p, p):
            raise DataError(f"B must be ({p}, {p}), got {B.shape}")
        if not np.all(np.isfinite(B)):
            raise DataError("B must be finite")
        if np.any(np.diag(B) != 0.0):
            raise DataError("B must have a zero diagonal")
        B = B.copy()
        B.setflags(write=False)
        object.__setattr__(self, "nodes", names)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "edges", tuple(self.edges))

        mask = B != 0.0
        if _pattern_topo_order(mask) is None:
            cycle = _find_cycle(mask, names)
            raise DataError(f"graph contains a cycle: {' -> '.join(cycle)}")

        index = {n: i for i, n in enumerate(names)}
        seen: set[tuple[str, str]] = set()
        for e in self.edges:
            if e.source not in index or e.target not in index:
                raise DataError(f"edge {e.source}->{e.target} references unknown nodes")
            key = (e.source, e.target)
            if key in seen:
                raise DataError(f"duplicate edge record {e.source}->{e.target}")
            seen.add(key)
            if B[index[e.target], index[e.source]] != e.weight:
                raise DataError(f"edge record {e.source}->{e.target} disagrees with B")
        n_nonzero = int(np.count_nonzero(B))
        if len(self.edges) != n_nonzero:
            raise DataError(
                f"edge list has {len(self.edges)} records but B has {n_nonzero} nonzero entries"
            )

    @classmethod
    def from_matrix(
        cls,
        nodes: Iterable[str],
        B: np.ndarray,
        provenance: Mapping | None = None,
        records: Mapping[tuple[str, str], EdgeRecord] | None = None,
    ) -> "CausalGraph":
        """Build a graph from a weight matrix, minting bare edge records for
        entries without supplied metadata."""
        names = tuple(nodes)
        B = np.asarray(B, dtype=float)
        edges: list[EdgeRecord] = []
        for tgt in range(B.shape[0]):
            for src in range(B.shape[1]):
                if B[tgt, src] != 0.0:
                    key = (names[src], names[tgt])
                    if records and key in records:
                        edges.append(records[key])
                    else:
                        edges.append(
                            EdgeRecord(source=names[src], target=names[tgt], weight=float(B[tgt, src]))
                        )
        edges.sort(key=lambda e: (e.source, e.target))
        return cls(nodes=names, B=B, edges=tuple(edges), provenance=dict(provenance or {}))

    @property
    def p(self) -> int:
        return len(self.nodes)

    def node_index(self, name: str) -> int:
        try:
            return self.nodes.index(name)
        except ValueError:
            raise DataError(f"unknown node {name!r}") from None

    def edge(self, source: str, target: str) -> EdgeRecord | None:
        for e in self.edges:
            if e.source == source and e.target == target:
                return e
        return None

    def parents(self, node: str) -> tuple[str, ...]:
        i = self.node_index(node)
        return tuple(sorted(self.nodes[j] for j in np.flatnonzero(self.B[i])))

    def children(self, node: str) -> tuple[str, ...]:
        j = self.node_index(node)
        return tuple(sorted(self.nodes[i] for i in np.flatnonzero(self.B[:, j])))

    def topological_order(self) -> tuple[str, ...]:
        order = _pattern_topo_order(self.B != 0.0)
        assert order is not None  # guaranteed by construction
        return tuple(self.nodes[i] for i in order)

    def to_dict(self) -> dict:
        edges = sorted(self.edges, key=lambda e: (e.source, e.target))
        return {
            "nodes": list(self.nodes),
            "edges": [e.to_dict() for e in edges],
            "provenance": self.provenance,
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    def canonical_json(self) -> str:
        """Stable byte-for-byte form: sorted keys, no whitespace."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: Mapping) -> "CausalGraph":
        names = tuple(d["nodes"])
        index = {n: i for i, n in enumerate(names)}
        B = np.zeros((len(names), len(names)))
        records: dict[tuple[str, str], EdgeRecord] = {}
        for ed in d.get("edges", []):
            rec = EdgeRecord.from_dict(ed)
            if rec.source not in index or rec.target not in index:
                raise DataError(f"edge {rec.source}->{rec.target} references unknown nodes")
            B[index[rec.target], index[rec.source]] = rec.weight
            records[(rec.source, rec.target)] = rec
        return cls.from_matrix(names, B, provenance=d.get("provenance"), records=records)

    @classmethod
    def from_json(cls, text: str | bytes) -> "CausalGraph":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid graph JSON: {exc}") from exc
        if not isinstance(payload, Mapping) or "nodes" not in payload:
            raise DataError("graph JSON must be an object with a 'nodes' list")
        return cls.from_dict(payload)

    def with_provenance(self, **extra) -> "CausalGraph":
        return replace(self, provenance={**self.provenance, **extra})


def check_acyclic(g: CausalGraph | np.ndarray, nodes: Iterable[str] | None = None) -> AcyclicityCheck:
    """Cycle test for a graph or raw weight matrix.

    Returns a deterministic topological order when acyclic (smallest node
    index first among the eligible), otherwise one explicit cycle.
    """
    if isinstance(g, CausalGraph):
        mask = g.B != 0.0
        names = g.nodes
    else:
        B = np.asarray(g, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise DataError("weight matrix must be square")
        mask = B != 0.0
        names = tuple(nodes) if nodes is not None else tuple(f"x{i+1}" for i in range(B.shape[0]))
        if len(names) != B.shape[0]:
            raise DataError("node list length must match matrix size")
    order = _pattern_topo_order(mask)
    if order is not None:
        return AcyclicityCheck(order=tuple(names[i] for i in order), cycle=None)
    return AcyclicityCheck(order=None, cycle=_find_cycle(mask, names))
