"""Question parsing: every template, slot capture, graceful fallback."""

import pytest

from causalscope.qa.questions import parse_count, parse_question, template_ids

CASES = [
    ("Does A cause B?", "structure.does_cause", {"source": "A", "target": "B"}),
    ("does tank_3 cause x9", "structure.does_cause", {"source": "tank_3", "target": "x9"}),
    (
        "Is there a causal relation between A and B?",
        "structure.causal_relation",
        {"first": "A", "second": "B"},
    ),
    (
        "Is there a causal relation between A and B (or between B and A)?",
        "structure.causal_relation",
        {"first": "A", "second": "B"},
    ),
    (
        "What variables have a direct causal effect on B (i.e., causal parents of B)?",
        "structure.parents",
        {"target": "B"},
    ),
    ("What are the causal parents of B?", "structure.parents", {"target": "B"}),
    (
        "What is the strength of the causal relation between A and B?",
        "reasoning.strength",
        {"source": "A", "target": "B"},
    ),
    (
        "Which variable has the strongest causal effect on B?",
        "reasoning.strongest_cause",
        {"target": "B"},
    ),
    (
        "If the value of A were set to 2.5, what would be the effect on B?",
        "reasoning.intervention",
        {"source": "A", "value": 2.5, "target": "B"},
    ),
    (
        "What is the most likely root cause of the anomalous value of variable B?",
        "rca.most_likely",
        {"target": "B"},
    ),
    (
        "What are the three most likely root causes of the anomalous value of variable B, ranked in descending order?",
        "rca.top_k",
        {"count": 3, "target": "B"},
    ),
    (
        "What are the 5 most likely root causes of the anomalous value of variable Y?",
        "rca.top_k",
        {"count": 5, "target": "Y"},
    ),
    (
        "Is A a likely root cause of the anomalous value of variable B?",
        "rca.is_likely",
        {"candidate": "A", "target": "B"},
    ),
    (
        "Which is more likely to be the root cause: A or D?",
        "rca.compare",
        {"first": "A", "second": "D"},
    ),
    (
        "Why is D not considered a likely root cause of the anomalous value of variable B?",
        "rca.why_not",
        {"candidate": "D", "target": "B"},
    ),
    ("Why is D not considered a likely root cause?", "rca.why_not", {"candidate": "D"}),
    (
        "What algorithm was used to learn the causal graph?",
        "discovery.algorithm",
        {},
    ),
    (
        "What is the stability score of the edge A -> B?",
        "discovery.edge_stability",
        {"source": "A", "target": "B"},
    ),
    (
        "What is the stability score of the edge A → B?",
        "discovery.edge_stability",
        {"source": "A", "target": "B"},
    ),
    (
        "Which edges in the graph are considered the least reliable?",
        "discovery.least_reliable",
        {},
    ),
    (
        "How many bootstrap iterations were used during causal discovery?",
        "discovery.bootstrap_count",
        {},
    ),
]


@pytest.mark.parametrize("text,template,slots", CASES, ids=[c[1] + ":" + c[0][:28] for c in CASES])
def test_templates_parse_with_slots(text, template, slots):
    q = parse_question(text)
    assert q.supported, text
    assert q.template_id == template
    for key, value in slots.items():
        assert q.slots.get(key) == value


def test_all_templates_have_at_least_one_case():
    covered = {c[1] for c in CASES}
    assert covered == set(template_ids())


def test_unmatched_text_is_unsupported():
    q = parse_question("please write a poem about turbines")
    assert not q.supported
    assert q.template_id is None


def test_count_words():
    assert parse_count("three") == 3
    assert parse_count("7") == 7
    assert parse_count("TEN") == 10


def test_case_insensitive_but_variables_verbatim():
    q = parse_question("DOES tank_A CAUSE Tank_B?")
    assert q.supported
    assert q.slots["source"] == "tank_A"
    assert q.slots["target"] == "Tank_B"
