"""Grounded answers to parsed questions.

Every answer is computed from engine state alone: the current graph, its
total-effect matrices, the last root-cause report, the discovery
configuration, and (when present) the ontology for phrasing and the
dataset for intervention baselines.  No text is produced that the state
cannot back up; missing state yields an explicit "state_unavailable"
verdict instead of a guess.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from causalscope.core.dataset import Dataset
from causalscope.core.graph import CausalGraph
from causalscope.discovery.lingam import DiscoveryConfig
from causalscope.effects.total import EffectMatrices, total_effects
from causalscope.errors import DataError
from causalscope.knowledge.ontology import OntologyStore
from causalscope.qa.memory import MemoryStore
from causalscope.qa.questions import ParsedQuestion, parse_question
from causalscope.rca.ranking import RcaReport, strongest_path

VERDICT_YES = "yes"
VERDICT_NO = "no"
VERDICT_VALUE = "value"
VERDICT_LIST = "list"
VERDICT_UNKNOWN_VARIABLE = "unknown_variable"
VERDICT_UNSUPPORTED = "unsupported"
VERDICT_UNAVAILABLE = "state_unavailable"


@dataclass
class EngineState:
    """Everything answers may draw on.  Only the graph is mandatory."""

    graph: CausalGraph
    effects: EffectMatrices | None = None
    rca: RcaReport | None = None
    config: DiscoveryConfig | None = None
    ontology: OntologyStore | None = None
    dataset: Dataset | None = None
    memory: MemoryStore | None = None

    def effect_matrices(self) -> EffectMatrices:
        if self.effects is None:
            self.effects = total_effects(self.graph)
        return self.effects


@dataclass(frozen=True)
class Answer:
    question: str
    template_id: str | None
    category: str | None
    verdict: str
    text: str
    values: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "question": self.question,
            "template_id": self.template_id,
            "category": self.category,
            "verdict": self.verdict,
            "text": self.text,
            "values": self.values,
        }


def _fmt(x: float) -> str:
    return f"{x:.3g}"


def _name(state: EngineState, var: str) -> str:
    if state.ontology is not None:
        return state.ontology.describe(var)
    return var


def _unknown(q: ParsedQuestion, var: str) -> Answer:
    return Answer(
        question=q.text,
        template_id=q.template_id,
        category=q.category,
        verdict=VERDICT_UNKNOWN_VARIABLE,
        text=f"Variable {var!r} is not part of the causal graph.",
        values={"variable": var},
    )


def _unavailable(q: ParsedQuestion, text: str) -> Answer:
    return Answer(
        question=q.text,
        template_id=q.template_id,
        category=q.category,
        verdict=VERDICT_UNAVAILABLE,
        text=text,
    )


def _answer(q: ParsedQuestion, verdict: str, text: str, **values) -> Answer:
    return Answer(
        question=q.text,
        template_id=q.template_id,
        category=q.category,
        verdict=verdict,
        text=text,
        values=values,
    )


def _resolve(q: ParsedQuestion, state: EngineState, *slot_names: str):
    """Fetch slot variables, or an unknown-variable Answer."""
    out = []
    for name in slot_names:
        var = q.slots[name]
        if var not in state.graph.nodes:
            return None, _unknown(q, var)
        out.append(var)
    return out, None


def _does_cause(q: ParsedQuestion, state: EngineState) -> Answer:
    resolved, err = _resolve(q, state, "source", "target")
    if err:
        return err
    src, tgt = resolved
    em = state.effect_matrices()
    direct = em.direct(src, tgt)
    total = em.tau(src, tgt)
    if direct != 0.0:
        edge = state.graph.edge(src, tgt)
        extra = ""
        if edge is not None and edge.stability is not None:
            extra = f", stability {_fmt(edge.stability)} ({edge.tier})"
        return _answer(
            q,
            VERDICT_YES,
            f"Yes. {_name(state, src)} directly causes {_name(state, tgt)} "
            f"(edge weight {_fmt(direct)}{extra}; total effect {_fmt(total)}).",
            direct=direct,
            total_effect=total,
            relation="direct",
        )
    if total != 0.0:
        path = strongest_path(em, src, tgt)
        route = " -> ".join(path) if path else f"{src} -> {tgt}"
        return _answer(
            q,
            VERDICT_YES,
            f"Yes, indirectly. {_name(state, src)} influences {_name(state, tgt)} "
            f"through {route} (total effect {_fmt(total)}).",
            direct=0.0,
            total_effect=total,
            relation="indirect",
            path=path,
        )
    return _answer(
        q,
        VERDICT_NO,
        f"No. There is no directed causal path from {src} to {tgt} in the graph.",
        direct=0.0,
        total_effect=0.0,
        relation="none",
    )


def _causal_relation(q: ParsedQuestion, state: EngineState) -> Answer:
    resolved, err = _resolve(q, state, "first", "second")
    if err:
        return err
    a, b = resolved
    em = state.effect_matrices()
    fwd = em.tau(a, b)
    rev = em.tau(b, a)
    if fwd != 0.0:
        return _answer(
            q,
            VERDICT_YES,
            f"Yes. {a} causally influences {b} (total effect {_fmt(fwd)}).",
            direction=f"{a}->{b}",
            total_effect=fwd,
        )
    if rev != 0.0:
        return _answer(
            q,
            VERDICT_YES,
            f"Yes, in the reverse direction: {b} causally influences {a} "
            f"(total effect {_fmt(rev)}).",
            direction=f"{b}->{a}",
            total_effect=rev,
        )
    return _answer(
        q,
        VERDICT_NO,
        f"No. Neither {a} nor {b} causally influences the other in the graph.",
        direction="none",
        total_effect=0.0,
    )


def _parents(q: ParsedQuestion, state: EngineState) -> Answer:
    resolved, err = _resolve(q, state, "target")
    if err:
        return err
    (tgt,) = resolved
    parents = state.graph.parents(tgt)
    if not parents:
        return _answer(
            q,
            VERDICT_LIST,
            f"{_name(state, tgt)} has no direct causes in the graph.",
            parents=[],
        )
    parts = []
    for p in parents:
        edge = state.graph.edge(p, tgt)
        parts.append(f"{_name(state, p)} (weight {_fmt(edge.weight)})")
    return _answer(
        q,
        VERDICT_LIST,
        f"The direct causes of {_name(state, tgt)} are: " + "; ".join(parts) + ".",
        parents=list(parents),
    )


def _strength(q: ParsedQuestion, state: EngineState) -> Answer:
    resolved, err = _resolve(q, state, "source", "target")
    if err:
        return err
    src, tgt = resolved
    em = state.effect_matrices()
    direct = em.direct(src, tgt)
    total = em.tau(src, tgt)
    if direct != 0.0:
        edge = state.graph.edge(src, tgt)
        stability = ""
        if edge is not None and edge.stability is not None:
            stability = f" with stability {_fmt(edge.stability)} ({edge.tier})"
        return _answer(
            q,
            VERDICT_VALUE,
            f"The direct effect of {_name(state, src)} on {_name(state, tgt)} is "
            f"{_fmt(direct)}{stability}; the total effect including mediated paths is "
            f"{_fmt(total)}.",
            direct=direct,
            total_effect=total,
        )
    if total != 0.0:
        return _answer(
            q,
            VERDICT_VALUE,
            f"{src} has no direct edge to {tgt}; its total effect through mediating "
            f"paths is {_fmt(total)}.",
            direct=0.0,
            total_effect=total,
        )
    rev = em.tau(tgt, src)
    if rev != 0.0:
        return _answer(
            q,
            VERDICT_VALUE,
            f"There is no effect of {src} on {tgt}; in the reverse direction {tgt} "
            f"affects {src} with total effect {_fmt(rev)}.",
            direct=0.0,
            total_effect=0.0,
            reverse_effect=rev,
        )
    return _answer(
        q,
        VERDICT_VALUE,
        f"There is no causal relation between {src} and {tgt} in the graph.",
        direct=0.0,
        total_effect=0.0,
    )


def _strongest_cause(q: ParsedQuestion, state: EngineState) -> Answer:
    resolved, err = _resolve(q, state, "target")
    if err:
        return err
    (tgt,) = resolved
    em = state.effect_matrices()
    t = em.node_index(tgt)
    best: tuple[float, str] | None = None
    for j, name in enumerate(em.nodes):
        if j == t or em.T[t, j] == 0.0:
            continue
        mag = abs(float(em.T[t, j]))
        if best is None or mag > best[0] or (mag == best[0] and name < best[1]):
            best = (mag, name)
    if best is None:
        return _answer(
            q,
            VERDICT_NO,
            f"No variable causally influences {tgt} in the graph.",
            variable=None,
        )
    mag, name = best
    tau = em.tau(name, tgt)
    return _answer(
        q,
        VERDICT_VALUE,
        f"{_name(state, name)} has the strongest causal effect on {_name(state, tgt)} "
        f"(total effect {_fmt(tau)}).",
        variable=name,
        total_effect=tau,
    )


def _intervention(q: ParsedQuestion, state: EngineState) -> Answer:
    resolved, err = _resolve(q, state, "source", "target")
    if err:
        return err
    src, tgt = resolved
    value = float(q.slots["value"])
    em = state.effect_matrices()
    tau = em.tau(src, tgt)
    if tau == 0.0:
        return _answer(
            q,
            VERDICT_VALUE,
            f"Setting {src} has no causal effect on {tgt}: there is no directed path.",
            tau=0.0,
            delta=0.0,
            baseline=None,
        )
    # Baseline for the shift: the source's observed mean when data is
    # loaded, otherwise 0 (pure unit-effect reading).
    if state.dataset is not None and src in state.dataset.variables:
        baseline = float(state.dataset.column(src).mean())
        basis = f"from its observed mean {_fmt(baseline)}"
    else:
        baseline = 0.0
        basis = "from baseline 0 (no dataset loaded)"
    delta = (value - baseline) * tau
    direction = "increase" if delta > 0 else "decrease" if delta < 0 else "not change"
    return _answer(
        q,
        VERDICT_VALUE,
        f"Setting {_name(state, src)} to {_fmt(value)} ({basis}) would {direction} "
        f"{_name(state, tgt)} by {_fmt(abs(delta))} (total effect {_fmt(tau)} per unit).",
        tau=tau,
        baseline=baseline,
        delta=delta,
    )


def _need_rca(q: ParsedQuestion, state: EngineState, tgt: str | None) -> RcaReport | Answer:
    if state.rca is None:
        return _unavailable(
            q, "No root-cause analysis is loaded; run an analysis for the anomalous variable first."
        )
    if tgt is not None and state.rca.target != tgt:
        return _unavailable(
            q,
            f"The loaded root-cause analysis targets {state.rca.target!r}, not {tgt!r}; "
            f"run an analysis for {tgt!r} first.",
        )
    return state.rca


def _rca_most_likely(q: ParsedQuestion, state: EngineState) -> Answer:
    resolved, err = _resolve(q, state, "target")
    if err:
        return err
    (tgt,) = resolved
    report = _need_rca(q, state, tgt)
    if isinstance(report, Answer):
        return report
    if not report.all_ranked:
        return _answer(
            q,
            VERDICT_NO,
            f"No causal ancestor of {tgt} is available as a root-cause candidate.",
            candidate=None,
        )
    top = report.all_ranked[0]
    return _answer(
        q,
        VERDICT_VALUE,
        f"The most likely root cause of the anomaly in {_name(state, tgt)} is "
        f"{_name(state, top.variable)} (score {_fmt(top.score)}). {top.explanation}.",
        candidate=top.variable,
        score=top.score,
    )


def _rca_top_k(q: ParsedQuestion, state: EngineState) -> Answer:
    resolved, err = _resolve(q, state, "target")
    if err:
        return err
    (tgt,) = resolved
    count = int(q.slots["count"])
    report = _need_rca(q, state, tgt)
    if isinstance(report, Answer):
        return report
    ranked = report.all_ranked[:count]
    if not ranked:
        return _answer(
            q,
            VERDICT_LIST,
            f"No root-cause candidates are available for {tgt}.",
            candidates=[],
        )
    lines = [
        f"{i}. {_name(state, c.variable)} (score {_fmt(c.score)})"
        for i, c in enumerate(ranked, start=1)
    ]
    note = "" if len(ranked) == count else f" Only {len(ranked)} candidate(s) exist."
    return _answer(
        q,
        VERDICT_LIST,
        f"Top {len(ranked)} root causes for the anomaly in {_name(state, tgt)}, "
        f"in descending order: " + "; ".join(lines) + "." + note,
        candidates=[c.variable for c in ranked],
        scores=[c.score for c in ranked],
    )


def _rca_is_likely(q: ParsedQuestion, state: EngineState) -> Answer:
    resolved, err = _resolve(q, state, "candidate", "target")
    if err:
        return err
    cand, tgt = resolved
    report = _need_rca(q, state, tgt)
    if isinstance(report, Answer):
        return report
    entry = report.candidate(cand)
    if entry is None:
        return _answer(
            q,
            VERDICT_NO,
            f"No. {cand} has no directed causal path to {tgt}, so it cannot be a root "
            f"cause of its anomaly.",
            candidate=cand,
            rank=None,
            score=0.0,
        )
    rank = report.rank_of(cand)
    if entry.score > 0.0 and rank is not None and rank <= report.k:
        return _answer(
            q,
            VERDICT_YES,
            f"Yes. {_name(state, cand)} ranks #{rank} with score {_fmt(entry.score)}. "
            f"{entry.explanation}.",
            candidate=cand,
            rank=rank,
            score=entry.score,
        )
    return _answer(
        q,
        VERDICT_NO,
        f"Unlikely. {_name(state, cand)} ranks #{rank} with score {_fmt(entry.score)}. "
        f"{entry.explanation}.",
        candidate=cand,
        rank=rank,
        score=entry.score,
    )


def _rca_compare(q: ParsedQuestion, state: EngineState) -> Answer:
    resolved, err = _resolve(q, state, "first", "second")
    if err:
        return err
    a, b = resolved
    report = _need_rca(q, state, None)
    if isinstance(report, Answer):
        return report
    ea = report.candidate(a)
    eb = report.candidate(b)
    sa = ea.score if ea else 0.0
    sb = eb.score if eb else 0.0
    pa = ea.path_strength if ea else 0.0
    pb = eb.path_strength if eb else 0.0
    if (sa, pa) == (sb, pb):
        return _answer(
            q,
            VERDICT_VALUE,
            f"{a} and {b} are equally likely root causes of the anomaly in "
            f"{report.target} (both score {_fmt(sa)}).",
            winner=None,
            scores={a: sa, b: sb},
        )
    winner, loser = (a, b) if (sa, pa) > (sb, pb) else (b, a)
    ws, ls = (sa, sb) if winner == a else (sb, sa)
    return _answer(
        q,
        VERDICT_VALUE,
        f"{_name(state, winner)} is the more likely root cause of the anomaly in "
        f"{report.target}: score {_fmt(ws)} versus {_fmt(ls)} for {loser}.",
        winner=winner,
        scores={a: sa, b: sb},
    )


def _rca_why_not(q: ParsedQuestion, state: EngineState) -> Answer:
    resolved, err = _resolve(q, state, "candidate")
    if err:
        return err
    (cand,) = resolved
    tgt = q.slots.get("target")
    if tgt is not None and tgt not in state.graph.nodes:
        return _unknown(q, tgt)
    report = _need_rca(q, state, tgt)
    if isinstance(report, Answer):
        return report
    entry = report.candidate(cand)
    if entry is None:
        return _answer(
            q,
            VERDICT_VALUE,
            f"{cand} has no directed causal path to {report.target} in the graph, so it "
            f"cannot explain the anomaly regardless of its own readings.",
            candidate=cand,
            reason="no_path",
        )
    rank = report.rank_of(cand)
    if entry.dev == 0.0:
        return _answer(
            q,
            VERDICT_VALUE,
            f"{_name(state, cand)} does influence {report.target} (path strength "
            f"{_fmt(entry.path_strength)}) but its own readings stayed inside the "
            f"tolerance band, so its root-cause score is 0 and it ranks #{rank}.",
            candidate=cand,
            reason="no_deviation",
            rank=rank,
        )
    if rank is not None and rank <= report.k:
        return _answer(
            q,
            VERDICT_VALUE,
            f"{cand} actually is a likely root cause: it ranks #{rank} with score "
            f"{_fmt(entry.score)}. {entry.explanation}.",
            candidate=cand,
            reason="is_likely",
            rank=rank,
        )
    return _answer(
        q,
        VERDICT_VALUE,
        f"{_name(state, cand)} deviates (dev {_fmt(entry.dev)}) but its influence on "
        f"{report.target} is weak (path strength {_fmt(entry.path_strength)}), giving "
        f"score {_fmt(entry.score)} and rank #{rank}, behind stronger candidates.",
        candidate=cand,
        reason="outranked",
        rank=rank,
    )


def _discovery_algorithm(q: ParsedQuestion, state: EngineState) -> Answer:
    method = state.graph.provenance.get("method")
    if method is None and state.config is not None:
        method = state.config.method
    if method is None:
        return _unavailable(q, "The graph does not record which discovery method produced it.")
    boot = state.graph.provenance.get("bootstrap")
    extra = ""
    if boot and boot.get("n_bootstrap"):
        extra = f" with {boot['n_bootstrap']} bootstrap replicates for edge stability"
    text = f"The causal graph was learned with the {method} algorithm{extra}."
    if state.graph.provenance.get("edits"):
        text += f" It has since received {len(state.graph.provenance['edits'])} operator edit(s)."
    return _answer(q, VERDICT_VALUE, text, method=method)


def _discovery_edge_stability(q: ParsedQuestion, state: EngineState) -> Answer:
    resolved, err = _resolve(q, state, "source", "target")
    if err:
        return err
    src, tgt = resolved
    edge = state.graph.edge(src, tgt)
    if edge is None:
        return _answer(
            q,
            VERDICT_NO,
            f"There is no edge {src} -> {tgt} in the graph.",
            stability=None,
        )
    if edge.stability is None:
        origin = "was added manually" if edge.tier == "manual" else "came from a single fit"
        return _answer(
            q,
            VERDICT_VALUE,
            f"The edge {src} -> {tgt} {origin} and has no bootstrap stability score.",
            stability=None,
            tier=edge.tier,
        )
    freq = ""
    if edge.frequency is not None:
        freq = f"; it appeared in {_fmt(100 * edge.frequency)}% of bootstrap replicates"
    return _answer(
        q,
        VERDICT_VALUE,
        f"The stability score of the edge {src} -> {tgt} is {_fmt(edge.stability)} "
        f"({edge.tier}){freq}.",
        stability=edge.stability,
        tier=edge.tier,
        frequency=edge.frequency,
    )


def _discovery_least_reliable(q: ParsedQuestion, state: EngineState) -> Answer:
    scored = [e for e in state.graph.edges if e.stability is not None]
    if not scored:
        return _unavailable(q, "No edge in the graph carries a bootstrap stability score.")
    lowest = min(e.stability for e in scored)
    worst = sorted(
        (e for e in scored if e.stability == lowest), key=lambda e: (e.source, e.target)
    )
    listing = "; ".join(
        f"{e.source} -> {e.target} (stability {_fmt(e.stability)}, {e.tier})" for e in worst
    )
    return _answer(
        q,
        VERDICT_LIST,
        f"The least reliable edge(s): {listing}.",
        edges=[[e.source, e.target] for e in worst],
        stability=lowest,
    )


def _discovery_bootstrap_count(q: ParsedQuestion, state: EngineState) -> Answer:
    n = None
    boot = state.graph.provenance.get("bootstrap")
    if boot and "n_bootstrap" in boot:
        n = boot["n_bootstrap"]
    elif isinstance(state.graph.provenance.get("config"), dict):
        n = state.graph.provenance["config"].get("n_bootstrap")
    elif state.config is not None:
        n = state.config.n_bootstrap
    if n is None:
        return _unavailable(q, "The graph does not record a bootstrap replicate count.")
    return _answer(
        q,
        VERDICT_VALUE,
        f"Causal discovery used {n} bootstrap replicates.",
        n_bootstrap=n,
    )


_HANDLERS = {
    "structure.does_cause": _does_cause,
    "structure.causal_relation": _causal_relation,
    "structure.parents": _parents,
    "reasoning.strength": _strength,
    "reasoning.strongest_cause": _strongest_cause,
    "reasoning.intervention": _intervention,
    "rca.most_likely": _rca_most_likely,
    "rca.top_k": _rca_top_k,
    "rca.is_likely": _rca_is_likely,
    "rca.compare": _rca_compare,
    "rca.why_not": _rca_why_not,
    "discovery.algorithm": _discovery_algorithm,
    "discovery.edge_stability": _discovery_edge_stability,
    "discovery.least_reliable": _discovery_least_reliable,
    "discovery.bootstrap_count": _discovery_bootstrap_count,
}


def answer_question(question: str | ParsedQuestion, state: EngineState) -> Answer:
    """Answer a natural-language question from engine state.

    Unsupported phrasing and unknown variables produce structured answers
    rather than exceptions; only a broken state (e.g. no graph) raises.
    """
    if isinstance(question, str):
        parsed = parse_question(question)
    else:
        parsed = question
    if not parsed.supported:
        return Answer(
            question=parsed.text,
            template_id=None,
            category=None,
            verdict=VERDICT_UNSUPPORTED,
            text=(
                "This question is not supported. Supported topics: graph structure, "
                "effect strength, interventions, root causes, and discovery settings."
            ),
        )
    handler = _HANDLERS.get(parsed.template_id)
    if handler is None:  # pragma: no cover - registry and handlers are kept in sync
        raise DataError(f"no handler for template {parsed.template_id!r}")
    return handler(parsed, state)
