"""Plant knowledge: entity descriptions, relation rules, expert tolerances.

The ontology is a single JSON document.  Entities map variable names to
metadata (type, description, unit, anomaly_relevance).  Relation rules are
default-allow with an explicit deny list of (source type, target type)
pairs.  Expert tolerance bands ride along in the same document.  The store
never mutates a graph; annotation produces a decorated view.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Mapping

from causalscope.core.graph import CausalGraph
from causalscope.errors import DataError
from causalscope.rca.tolerance import ToleranceSpec


def _reject_duplicate_keys(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise DataError(f"duplicate key {key!r} in ontology document")
        seen[key] = value
    return seen


@dataclass(frozen=True, eq=False)
class OntologyStore:
    entities: Mapping[str, dict]
    deny_rules: frozenset[tuple[str, str]] = frozenset()
    tolerances: ToleranceSpec | None = None

    def __post_init__(self) -> None:
        ents = {}
        for name, meta in dict(self.entities).items():
            if not isinstance(meta, Mapping):
                raise DataError(f"entity {name!r} must be an object")
            meta = dict(meta)
            if "type" not in meta or not isinstance(meta["type"], str) or not meta["type"]:
                raise DataError(f"entity {name!r} needs a non-empty 'type'")
            ents[name] = meta
        object.__setattr__(self, "entities", ents)
        object.__setattr__(self, "deny_rules", frozenset(tuple(r) for r in self.deny_rules))

    @classmethod
    def from_json(cls, text: str | bytes) -> "OntologyStore":
        try:
            doc = json.loads(text, object_pairs_hook=_reject_duplicate_keys)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid ontology JSON: {exc}") from exc
        if not isinstance(doc, Mapping):
            raise DataError("ontology document must be a JSON object")
        entities = doc.get("entities", {})
        if not isinstance(entities, Mapping):
            raise DataError("'entities' must be an object")
        rules = doc.get("relation_rules", {})
        if not isinstance(rules, Mapping):
            raise DataError("'relation_rules' must be an object")
        deny = rules.get("deny", [])
        deny_rules: set[tuple[str, str]] = set()
        for pair in deny:
            if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
                raise DataError(f"deny rule must be a [source_type, target_type] pair, got {pair!r}")
            deny_rules.add((str(pair[0]), str(pair[1])))
        tol = None
        if "tolerances" in doc and doc["tolerances"]:
            tol = ToleranceSpec.from_dict(doc["tolerances"])
        return cls(entities=entities, deny_rules=frozenset(deny_rules), tolerances=tol)

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "OntologyStore":
        try:
            with open(path, "rb") as fh:
                return cls.from_json(fh.read())
        except OSError as exc:
            raise DataError(f"cannot read ontology file {path}: {exc}") from exc

    @classmethod
    def empty(cls) -> "OntologyStore":
        return cls(entities={}, deny_rules=frozenset(), tolerances=None)

    def has_entity(self, name: str) -> bool:
        return name in self.entities

    def entity(self, name: str) -> dict | None:
        meta = self.entities.get(name)
        return dict(meta) if meta is not None else None

    def entity_type(self, name: str) -> str | None:
        meta = self.entities.get(name)
        return meta["type"] if meta else None

    def relation_allowed(self, source_type: str, target_type: str) -> bool:
        """Type-level rule check: everything is allowed unless denied."""
        return (source_type, target_type) not in self.deny_rules

    def relation_allowed_between(self, source: str, target: str) -> bool:
        """Entity-level check.  Unknown entities have no type, so no deny
        rule can match them; existence is enforced elsewhere."""
        st = self.entity_type(source)
        tt = self.entity_type(target)
        if st is None or tt is None:
            return True
        return self.relation_allowed(st, tt)

    def describe(self, name: str) -> str:
        """Short human phrase for answer text: description plus unit when
        known, otherwise just the variable name."""
        meta = self.entities.get(name)
        if not meta:
            return name
        parts = []
        if meta.get("description"):
            parts.append(str(meta["description"]))
        if meta.get("unit"):
            parts.append(f"measured in {meta['unit']}")
        if not parts:
            return name
        return f"{name} ({', '.join(parts)})"

    def to_dict(self) -> dict:
        return {
            "entities": {k: dict(v) for k, v in sorted(self.entities.items())},
            "relation_rules": {"deny": sorted(list(r) for r in self.deny_rules)},
            "tolerances": self.tolerances.to_dict() if self.tolerances else {},
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


@dataclass(frozen=True, eq=False)
class AnnotatedGraph:
    """A graph plus ontology decorations.  The underlying graph object is
    untouched; nodes absent from the ontology are marked unannotated."""

    graph: CausalGraph
    nodes: Mapping[str, dict] = field(default_factory=dict)
    edge_tooltips: tuple[dict, ...] = ()

    def to_dict(self) -> dict:
        return {
            "graph": self.graph.to_dict(),
            "nodes": {k: dict(v) for k, v in self.nodes.items()},
            "edge_tooltips": [dict(t) for t in self.edge_tooltips],
        }


def _edge_tooltip(e, onto: OntologyStore) -> dict:
    src = onto.describe(e.source)
    tgt = onto.describe(e.target)
    bits = [f"{src} -> {tgt}", f"weight {e.weight:.3g}"]
    if e.stability is not None:
        bits.append(f"stability {e.stability:.3g} ({e.tier})")
    elif e.tier is not None:
        bits.append(e.tier)
    return {"source": e.source, "target": e.target, "text": "; ".join(bits)}


def annotate_graph(g: CausalGraph, onto: OntologyStore) -> AnnotatedGraph:
    """Decorate nodes and edges with ontology metadata (pure function)."""
    nodes: dict[str, dict] = {}
    for name in g.nodes:
        meta = onto.entity(name)
        if meta is None:
            nodes[name] = {"unannotated": True}
        else:
            nodes[name] = {**meta, "unannotated": False}
    tooltips = tuple(
        _edge_tooltip(e, onto) for e in sorted(g.edges, key=lambda e: (e.source, e.target))
    )
    return AnnotatedGraph(graph=g, nodes=nodes, edge_tooltips=tooltips)
