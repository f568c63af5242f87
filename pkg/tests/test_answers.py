"""Structured answers over a fixed graph: A->B (0.8), B->C (0.65), D->B (-0.45)."""

import numpy as np
import pytest

from causalscope.core.dataset import Dataset
from causalscope.effects.total import total_effects
from causalscope.qa.answers import (
    EngineState,
    VERDICT_LIST,
    VERDICT_NO,
    VERDICT_UNAVAILABLE,
    VERDICT_UNKNOWN_VARIABLE,
    VERDICT_UNSUPPORTED,
    VERDICT_VALUE,
    VERDICT_YES,
    answer_question,
)
from causalscope.rca.ranking import rank_root_causes
from causalscope.rca.tolerance import (
    ToleranceBand,
    ToleranceSpec,
    WILDCARD_STATE,
    detect_deviations,
)


@pytest.fixture(scope="module")
def state(demo):
    return EngineState(graph=demo)


@pytest.fixture(scope="module")
def rca_state(demo):
    em = total_effects(demo)
    bands = ToleranceSpec(
        entries={(n, WILDCARD_STATE): ToleranceBand(-1.0, 1.0) for n in demo.nodes}
    )
    report = detect_deviations({"A": 3.0, "B": 0.5, "C": 2.0, "D": 0.0}, bands)
    rca = rank_root_causes(report, em, "C", k=3)
    return EngineState(graph=demo, rca=rca)


def ask(state, text):
    return answer_question(text, state)


def test_direct_cause(state):
    a = ask(state, "Does A cause B?")
    assert a.verdict == VERDICT_YES and "directly" in a.text
    assert a.values["relation"] == "direct"
    assert a.values["direct"] == pytest.approx(0.8)


def test_reverse_direction_is_no(state):
    assert ask(state, "Does B cause A?").verdict == VERDICT_NO


def test_indirect_cause_names_path(state):
    a = ask(state, "Does A cause C?")
    assert a.verdict == VERDICT_YES
    assert "A -> B -> C" in a.text
    assert a.values["total_effect"] == pytest.approx(0.8 * 0.65)


def test_relation_checks_both_directions(state):
    rev = ask(state, "Is there a causal relation between C and A?")
    assert rev.verdict == VERDICT_YES and rev.values["direction"] == "A->C"
    none = ask(state, "Is there a causal relation between A and D?")
    assert none.verdict == VERDICT_NO


def test_unknown_variable_verdict(state):
    a = ask(state, "Is there a causal relation between A and Z?")
    assert a.verdict == VERDICT_UNKNOWN_VARIABLE
    assert "Z" in a.text


def test_parents_list(state):
    a = ask(state, "What variables have a direct causal effect on B (i.e., causal parents of B)?")
    assert a.verdict == VERDICT_LIST
    assert a.values["parents"] == ["A", "D"]
    no_parents = ask(state, "What are the causal parents of A?")
    assert no_parents.values["parents"] == []


def test_strength_reports_direct_and_total(state):
    a = ask(state, "What is the strength of the causal relation between A and B?")
    assert a.verdict == VERDICT_VALUE
    assert a.values["direct"] == pytest.approx(0.8)
    assert a.values["total_effect"] == pytest.approx(0.8)
    rev = ask(state, "What is the strength of the causal relation between C and B?")
    assert rev.values["reverse_effect"] == pytest.approx(0.65)


def test_strongest_cause(state):
    a = ask(state, "Which variable has the strongest causal effect on B?")
    assert a.verdict == VERDICT_VALUE
    assert a.values["variable"] == "A"


def test_intervention_without_data_uses_zero_baseline(state):
    a = ask(state, "If the value of A were set to 2.0, what would be the effect on B?")
    assert a.verdict == VERDICT_VALUE
    assert a.values["delta"] == pytest.approx(1.6)
    assert "baseline 0" in a.text


def test_intervention_with_data_uses_mean_baseline(demo):
    vals = np.column_stack(
        [np.full(50, 1.0), np.zeros(50), np.zeros(50), np.zeros(50)]
    )
    d = Dataset(variables=("A", "B", "C", "D"), values=vals)
    st = EngineState(graph=demo, dataset=d)
    a = ask(st, "If the value of A were set to 2.0, what would be the effect on B?")
    # (2.0 - mean(A)=1.0) * 0.8
    assert a.values["baseline"] == pytest.approx(1.0)
    assert a.values["delta"] == pytest.approx(0.8)
    assert "observed mean" in a.text


def test_rca_questions_require_report(state):
    for text in (
        "What is the most likely root cause of the anomalous value of variable C?",
        "Is A a likely root cause of the anomalous value of variable C?",
        "Which is more likely to be the root cause: A or D?",
    ):
        assert ask(state, text).verdict == VERDICT_UNAVAILABLE


def test_rca_target_mismatch_is_unavailable(rca_state):
    a = ask(rca_state, "What is the most likely root cause of the anomalous value of variable B?")
    assert a.verdict == VERDICT_UNAVAILABLE
    assert "'C'" in a.text


def test_rca_most_likely(rca_state):
    a = ask(rca_state, "What is the most likely root cause of the anomalous value of variable C?")
    assert a.verdict == VERDICT_VALUE
    assert a.values["candidate"] == "A"
    assert a.values["score"] == pytest.approx(0.8 * 0.65)


def test_rca_top_k(rca_state):
    a = ask(
        rca_state,
        "What are the two most likely root causes of the anomalous value of variable C, ranked in descending order?",
    )
    assert a.verdict == VERDICT_LIST
    # A deviates; B and D do not, so they tie at 0 and order by |tau|
    assert a.values["candidates"] == ["A", "B"]


def test_rca_is_likely_yes_and_no(rca_state):
    yes = ask(rca_state, "Is A a likely root cause of the anomalous value of variable C?")
    assert yes.verdict == VERDICT_YES and yes.values["rank"] == 1
    no = ask(rca_state, "Is D a likely root cause of the anomalous value of variable C?")
    assert no.verdict == VERDICT_NO


def test_rca_compare(rca_state):
    a = ask(rca_state, "Which is more likely to be the root cause: A or D?")
    assert a.verdict == VERDICT_VALUE
    assert a.values["winner"] == "A"
    assert set(a.values["scores"]) == {"A", "D"}


def test_rca_why_not_reasons(rca_state):
    no_dev = ask(
        rca_state,
        "Why is D not considered a likely root cause of the anomalous value of variable C?",
    )
    assert no_dev.verdict == VERDICT_VALUE
    assert no_dev.values["reason"] == "no_deviation"

    is_likely = ask(
        rca_state,
        "Why is A not considered a likely root cause of the anomalous value of variable C?",
    )
    assert is_likely.values["reason"] == "is_likely"


def test_discovery_algorithm(demo):
    a = ask(EngineState(graph=demo), "What algorithm was used to learn the causal graph?")
    assert a.verdict == VERDICT_VALUE
    assert a.values["method"] == "lingam"
    assert "100 bootstrap replicates" in a.text


def test_edge_stability(demo):
    st = EngineState(graph=demo)
    a = ask(st, "What is the stability score of the edge A -> B?")
    assert a.verdict == VERDICT_VALUE
    assert a.values["stability"] == pytest.approx(1.0 / 1.08)
    missing = ask(st, "What is the stability score of the edge C -> D?")
    assert missing.verdict == VERDICT_NO


def test_least_reliable(demo):
    a = ask(EngineState(graph=demo), "Which edges in the graph are considered the least reliable?")
    assert a.verdict == VERDICT_LIST
    # D->B has the widest bootstrap spread of the three demo edges
    assert a.values["edges"] == [["D", "B"]]


def test_bootstrap_count(demo):
    a = ask(EngineState(graph=demo), "How many bootstrap iterations were used during causal discovery?")
    assert a.verdict == VERDICT_VALUE
    assert a.values["n_bootstrap"] == 100


def test_unsupported_question(state):
    a = ask(state, "please summarize the plant status")
    assert a.verdict == VERDICT_UNSUPPORTED


def test_answer_to_dict(state):
    out = ask(state, "Does A cause B?").to_dict()
    assert {"question", "template_id", "category", "verdict", "text", "values"} <= set(out)
