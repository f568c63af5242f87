import json

import pytest

from causalscope.errors import DataError
from causalscope.knowledge.ontology import OntologyStore, annotate_graph

ONTO = {
    "entities": {
        "A": {"type": "sensor", "description": "inlet temperature", "unit": "C"},
        "B": {"type": "sensor", "description": "chamber pressure", "unit": "bar"},
        "C": {"type": "sensor"},
        "D": {"type": "indicator", "description": "quality flag"},
    },
    "relation_rules": {"deny": [["indicator", "sensor"]]},
}


def store():
    return OntologyStore.from_json(json.dumps(ONTO))


def test_lookup_and_describe():
    s = store()
    assert s.has_entity("A") and not s.has_entity("Z")
    assert s.entity_type("D") == "indicator"
    assert s.describe("A") == "A (inlet temperature, measured in C)"
    assert s.describe("C") == "C"
    assert s.describe("Z") == "Z"


def test_relation_rules():
    s = store()
    assert s.relation_allowed("sensor", "sensor")
    assert not s.relation_allowed("indicator", "sensor")
    assert s.relation_allowed_between("A", "B")
    # indicator -> sensor is denied by type rule
    assert not s.relation_allowed_between("D", "A")
    # unknown entities fall through; existence is checked elsewhere
    assert s.relation_allowed_between("Z", "A")


def test_duplicate_json_keys_rejected():
    bad = '{"entities": {"A": {"type": "sensor"}, "A": {"type": "sensor"}}}'
    with pytest.raises(DataError):
        OntologyStore.from_json(bad)


def test_entity_requires_type():
    with pytest.raises(DataError):
        OntologyStore.from_json('{"entities": {"A": {}}}')


def test_round_trip():
    s = store()
    back = OntologyStore.from_json(s.to_json())
    assert back.to_dict() == s.to_dict()


def test_empty_store_allows_everything():
    s = OntologyStore.empty()
    assert not s.has_entity("A")
    assert s.relation_allowed_between("A", "B")


def test_annotate_graph_tooltips(demo):
    s = store()
    ann = annotate_graph(demo, s)
    assert set(ann.nodes) == {"A", "B", "C", "D"}
    assert ann.nodes["A"]["description"] == "inlet temperature"
    assert ann.nodes["A"]["unit"] == "C"
    keys = [(t["source"], t["target"]) for t in ann.edge_tooltips]
    assert keys == sorted(keys)
    tip = next(t for t in ann.edge_tooltips if (t["source"], t["target"]) == ("A", "B"))
    assert "0.8" in tip["text"] and "stability" in tip["text"]


def test_annotate_marks_unknown_nodes(demo):
    ann = annotate_graph(demo, OntologyStore.empty())
    assert all(n.get("unannotated") for n in ann.nodes.values())
