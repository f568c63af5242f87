"""Operator edits to the causal graph, with validation and an audit log.

Edits are validated against both graph structure (acyclicity, existence)
and the ontology's relation rules before being applied.  Accepted edits
produce a new graph value; nothing is mutated.  The edit log is an
append-only JSON-lines file whose replay reproduces the edited graph
exactly.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from causalscope.core.graph import CausalGraph, EdgeRecord, TIER_MANUAL, check_acyclic
from causalscope.errors import DataError
from causalscope.knowledge.ontology import OntologyStore

EDIT_KINDS = ("add_node", "remove_node", "add_edge", "remove_edge")

REASON_CYCLE = "cycle"
REASON_RELATION_DENIED = "ontology_relation_denied"
REASON_UNKNOWN_ENTITY = "unknown_entity"
REASON_UNKNOWN_NODE = "unknown_node"
REASON_UNKNOWN_EDGE = "unknown_edge"
REASON_DUPLICATE_NODE = "duplicate_node"
REASON_DUPLICATE_EDGE = "duplicate_edge"


@dataclass(frozen=True)
class GraphEdit:
    """One requested change.  ``timestamp`` is supplied by the caller (the
    operator's clock), never read from the server, so replays are
    deterministic."""

    kind: str
    node: str | None = None
    source: str | None = None
    target: str | None = None
    weight: float | None = None
    author: str = ""
    timestamp: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in EDIT_KINDS:
            raise DataError(f"unknown edit kind {self.kind!r}; expected one of {EDIT_KINDS}")
        if self.kind in ("add_node", "remove_node"):
            if not self.node:
                raise DataError(f"{self.kind} requires 'node'")
        else:
            if not self.source or not self.target:
                raise DataError(f"{self.kind} requires 'source' and 'target'")
            if self.source == self.target:
                raise DataError("source and target must differ")
        if self.kind == "add_edge" and self.weight == 0.0:
            raise DataError("edge weight must be nonzero")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "node": self.node,
            "source": self.source,
            "target": self.target,
            "weight": self.weight,
            "author": self.author,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GraphEdit":
        return cls(
            kind=d.get("kind", ""),
            node=d.get("node"),
            source=d.get("source"),
            target=d.get("target"),
            weight=d.get("weight"),
            author=d.get("author", ""),
            timestamp=float(d.get("timestamp", 0.0)),
        )


@dataclass(frozen=True)
class EditResult:
    accepted: bool
    graph: CausalGraph | None
    reason: str | None
    message: str


def _with_edit_provenance(g: CausalGraph, edit: GraphEdit) -> CausalGraph:
    history = list(g.provenance.get("edits", []))
    history.append(edit.to_dict())
    return g.with_provenance(edits=history)


def validate_edit(g: CausalGraph, edit: GraphEdit, onto: OntologyStore) -> EditResult:
    """Validate and, when valid, apply one edit.

    Rejection reasons: cycle (edge would close a directed loop),
    ontology_relation_denied (type pair on the deny list), unknown_entity
    (addition names something the ontology does not know),
    unknown_node/unknown_edge (removal or endpoint missing from the graph),
    duplicate_node/duplicate_edge.  Removing a node drops its incident
    edges.  Accepted results carry a brand-new graph; manual edges get
    tier "manual" and no stability statistics.
    """
    if edit.kind == "add_node":
        name = edit.node
        if name in g.nodes:
            return EditResult(False, None, REASON_DUPLICATE_NODE, f"node {name!r} already exists")
        if not onto.has_entity(name):
            return EditResult(
                False, None, REASON_UNKNOWN_ENTITY, f"entity {name!r} is not in the ontology"
            )
        p = g.p
        B = np.zeros((p + 1, p + 1))
        B[:p, :p] = g.B
        records = {(e.source, e.target): e for e in g.edges}
        new = CausalGraph.from_matrix(g.nodes + (name,), B, provenance=g.provenance, records=records)
        return EditResult(True, _with_edit_provenance(new, edit), None, f"added node {name!r}")

    if edit.kind == "remove_node":
        name = edit.node
        if name not in g.nodes:
            return EditResult(False, None, REASON_UNKNOWN_NODE, f"node {name!r} is not in the graph")
        keep = [i for i, n in enumerate(g.nodes) if n != name]
        B = g.B[np.ix_(keep, keep)]
        names = tuple(g.nodes[i] for i in keep)
        records = {
            (e.source, e.target): e for e in g.edges if name not in (e.source, e.target)
        }
        dropped = len(g.edges) - len(records)
        new = CausalGraph.from_matrix(names, B, provenance=g.provenance, records=records)
        msg = f"removed node {name!r}"
        if dropped:
            msg += f" and {dropped} incident edge(s)"
        return EditResult(True, _with_edit_provenance(new, edit), None, msg)

    # Edge edits: both endpoints must already be graph nodes.
    for endpoint in (edit.source, edit.target):
        if endpoint not in g.nodes:
            return EditResult(
                False, None, REASON_UNKNOWN_NODE, f"node {endpoint!r} is not in the graph"
            )

    if edit.kind == "add_edge":
        for endpoint in (edit.source, edit.target):
            if not onto.has_entity(endpoint):
                return EditResult(
                    False,
                    None,
                    REASON_UNKNOWN_ENTITY,
                    f"entity {endpoint!r} is not in the ontology",
                )
        if g.edge(edit.source, edit.target) is not None:
            return EditResult(
                False,
                None,
                REASON_DUPLICATE_EDGE,
                f"edge {edit.source}->{edit.target} already exists",
            )
        if not onto.relation_allowed_between(edit.source, edit.target):
            return EditResult(
                False,
                None,
                REASON_RELATION_DENIED,
                f"ontology denies {onto.entity_type(edit.source)} -> "
                f"{onto.entity_type(edit.target)} relations",
            )
        weight = 1.0 if edit.weight is None else float(edit.weight)
        src, tgt = g.node_index(edit.source), g.node_index(edit.target)
        B = g.B.copy()
        B[tgt, src] = weight
        verdict = check_acyclic(B, g.nodes)
        if not verdict.is_acyclic:
            return EditResult(
                False,
                None,
                REASON_CYCLE,
                f"edge would create a cycle: {' -> '.join(verdict.cycle)}",
            )
        records = {(e.source, e.target): e for e in g.edges}
        records[(edit.source, edit.target)] = EdgeRecord(
            source=edit.source, target=edit.target, weight=weight, tier=TIER_MANUAL
        )
        new = CausalGraph.from_matrix(g.nodes, B, provenance=g.provenance, records=records)
        return EditResult(
            True, _with_edit_provenance(new, edit), None, f"added edge {edit.source}->{edit.target}"
        )

    # remove_edge
    if g.edge(edit.source, edit.target) is None:
        return EditResult(
            False, None, REASON_UNKNOWN_EDGE, f"edge {edit.source}->{edit.target} does not exist"
        )
    src, tgt = g.node_index(edit.source), g.node_index(edit.target)
    B = g.B.copy()
    B[tgt, src] = 0.0
    records = {
        (e.source, e.target): e
        for e in g.edges
        if (e.source, e.target) != (edit.source, edit.target)
    }
    new = CausalGraph.from_matrix(g.nodes, B, provenance=g.provenance, records=records)
    return EditResult(
        True, _with_edit_provenance(new, edit), None, f"removed edge {edit.source}->{edit.target}"
    )


class EditLog:
    """Append-only JSON-lines audit log of edit attempts.

    Every validation outcome is appended, accepted or not.  Replaying the
    accepted entries over the same base graph must reproduce the same final
    graph; a replay that hits a rejection means the log or base is corrupt.
    """

    def __init__(self, path: str | os.PathLike):
        self.path = os.fspath(path)

    def append(self, edit: GraphEdit, result: EditResult, version: int | None = None) -> None:
        entry = {
            "edit": edit.to_dict(),
            "accepted": result.accepted,
            "reason": result.reason,
            "message": result.message,
            "version": version,
        }
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")

    def entries(self) -> list[dict]:
        if not os.path.exists(self.path):
            return []
        out: list[dict] = []
        with open(self.path, "r", encoding="utf-8") as fh:
            for i, line in enumerate(fh):
                line = line.strip()
                if not line:
                    continue
                try:
                    out.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise DataError(f"corrupt edit log line {i + 1}: {exc}") from exc
        return out

    def replay(self, base: CausalGraph, onto: OntologyStore) -> CausalGraph:
        """Re-apply every accepted edit in order."""
        g = base
        for i, entry in enumerate(self.entries()):
            if not entry.get("accepted"):
                continue
            edit = GraphEdit.from_dict(entry["edit"])
            result = validate_edit(g, edit, onto)
            if not result.accepted:
                raise DataError(
                    f"edit log replay failed at entry {i + 1}: {result.reason}: {result.message}"
                )
            g = result.graph
        return g
