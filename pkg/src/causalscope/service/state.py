"""Shared service state: datasets, jobs, versioned graphs, caches.

The hub is the single owner of mutable state.  Identifiers are sequential
("ds-1", "job-1", "replay-1") and graph versions form an integer chain, so
a fixed call sequence always produces the same identifiers and the same
response bytes.  Memory timestamps default to a logical counter for the
same reason; pass a real clock to trade determinism for wall time.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from typing import Callable

from causalscope.core.dataset import Dataset, load_dataset
from causalscope.core.features import FeatureSelection, select_features
from causalscope.core.graph import CausalGraph
from causalscope.discovery.bootstrap import bootstrap_stability, filter_edges
from causalscope.discovery.lingam import DiscoveryConfig
from causalscope.effects.total import EffectMatrices, total_effects
from causalscope.errors import DataError
from causalscope.knowledge.edits import EditLog, EditResult, GraphEdit, validate_edit
from causalscope.knowledge.ontology import OntologyStore, annotate_graph
from causalscope.qa.answers import EngineState, answer_question
from causalscope.qa.memory import MemoryStore
from causalscope.rca.ranking import RcaReport, rank_root_causes
from causalscope.rca.tolerance import ToleranceSpec, detect_deviations, fit_tolerances
from causalscope.service.stream import DEFAULT_RATE_HZ, ReplaySession


def _logical_clock() -> Callable[[], float]:
    counter = {"t": -1.0}

    def tick() -> float:
        counter["t"] += 1.0
        return counter["t"]

    return tick


@dataclass
class HubConfig:
    state_dir: str | None = None
    ontology: OntologyStore | None = None
    wall_clock_memory: bool = False
    replay_rate: float = DEFAULT_RATE_HZ


@dataclass
class Job:
    job_id: str
    dataset_id: str
    status: str  # queued | done | failed
    config: DiscoveryConfig
    graph_version: int | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "dataset_id": self.dataset_id,
            "status": self.status,
            "config": self.config.to_dict(),
            "graph_version": self.graph_version,
            "error": self.error,
        }


@dataclass
class GraphVersion:
    version: int
    graph: CausalGraph
    dataset_id: str | None


class EngineHub:
    """Owns every piece of server state and the operations that change it."""

    def __init__(self, config: HubConfig | None = None):
        self.config = config or HubConfig()
        state_dir = self.config.state_dir or tempfile.mkdtemp(prefix="causalscope-")
        os.makedirs(state_dir, exist_ok=True)
        self.state_dir = state_dir
        self.ontology = self.config.ontology or OntologyStore.empty()
        clock = None if self.config.wall_clock_memory else _logical_clock()
        self.memory = MemoryStore(os.path.join(state_dir, "memory"), clock=clock)
        self.edit_log = EditLog(os.path.join(state_dir, "edits.jsonl"))

        self.datasets: dict[str, Dataset] = {}
        self.jobs: dict[str, Job] = {}
        self.versions: list[GraphVersion] = []
        self.tolerances: ToleranceSpec | None = (
            self.ontology.tolerances if self.ontology else None
        )
        self.last_rca: RcaReport | None = None
        self.last_deviations: dict | None = None
        self.last_config: DiscoveryConfig | None = None
        self._effects_cache: dict[int, EffectMatrices] = {}
        self.replays: dict[str, ReplaySession] = {}
        self._counters = {"dataset": 0, "job": 0, "replay": 0}

    # -- identifiers -------------------------------------------------------

    def _next_id(self, kind: str, prefix: str) -> str:
        self._counters[kind] += 1
        return f"{prefix}-{self._counters[kind]}"

    # -- datasets ----------------------------------------------------------

    def add_dataset(self, csv_payload: str | bytes) -> tuple[str, Dataset]:
        d = load_dataset(csv_payload)
        dataset_id = self._next_id("dataset", "ds")
        self.datasets[dataset_id] = d
        self.memory.record(
            "episodic",
            {"event": "dataset_loaded", "dataset_id": dataset_id, "rows": d.rows},
        )
        return dataset_id, d

    def get_dataset(self, dataset_id: str) -> Dataset:
        if dataset_id not in self.datasets:
            raise KeyError(f"unknown dataset {dataset_id!r}")
        return self.datasets[dataset_id]

    def run_feature_selection(
        self, dataset_id: str, method: str, k: int | None, names: list[str] | None
    ) -> FeatureSelection:
        return select_features(self.get_dataset(dataset_id), method=method, k=k, names=names)

    # -- discovery ---------------------------------------------------------

    def run_discovery(
        self,
        dataset_id: str,
        config: DiscoveryConfig | None = None,
        variables: list[str] | None = None,
    ) -> Job:
        """Run discovery as a job.  Execution is synchronous so a fixed call
        sequence yields a fixed response sequence; the job record still
        carries the status lifecycle for polling clients."""
        d = self.get_dataset(dataset_id)
        if variables:
            d = d.subset(variables)
        cfg = config or DiscoveryConfig()
        job = Job(
            job_id=self._next_id("job", "job"),
            dataset_id=dataset_id,
            status="queued",
            config=cfg,
        )
        self.jobs[job.job_id] = job
        try:
            summary = bootstrap_stability(d, cfg)
            graph = filter_edges(summary, cfg)
        except Exception as exc:  # job failure is part of the contract
            job.status = "failed"
            job.error = f"{type(exc).__name__}: {exc}"
            self.memory.record(
                "episodic",
                {"event": "discovery_failed", "job_id": job.job_id, "error": job.error},
            )
            return job
        version = self._install_graph(graph, dataset_id)
        # Healthy-data tolerance bands come along for free at discovery
        # time; explicit ontology bands take precedence.
        if self.ontology.tolerances is None:
            try:
                self.tolerances = fit_tolerances(d)
            except DataError:
                self.tolerances = None
        self.last_config = cfg
        job.status = "done"
        job.graph_version = version
        self.memory.record(
            "episodic",
            {
                "event": "discovery_completed",
                "job_id": job.job_id,
                "dataset_id": dataset_id,
                "graph_version": version,
                "n_edges": len(graph.edges),
            },
        )
        return job

    def get_job(self, job_id: str) -> Job:
        if job_id not in self.jobs:
            raise KeyError(f"unknown job {job_id!r}")
        return self.jobs[job_id]

    # -- graph versions ------------------------------------------------------

    def _install_graph(self, graph: CausalGraph, dataset_id: str | None) -> int:
        version = len(self.versions) + 1
        self.versions.append(GraphVersion(version=version, graph=graph, dataset_id=dataset_id))
        return version

    def set_graph(self, graph: CausalGraph, dataset_id: str | None = None) -> int:
        return self._install_graph(graph, dataset_id)

    @property
    def current(self) -> GraphVersion:
        if not self.versions:
            raise KeyError("no causal graph available; run discovery first")
        return self.versions[-1]

    @property
    def has_graph(self) -> bool:
        return bool(self.versions)

    def graph_payload(self) -> dict:
        gv = self.current
        annotated = annotate_graph(gv.graph, self.ontology)
        return {
            "version": gv.version,
            "dataset_id": gv.dataset_id,
            "graph": gv.graph.to_dict(),
            "annotations": {
                "nodes": {k: dict(v) for k, v in annotated.nodes.items()},
                "edge_tooltips": list(annotated.edge_tooltips),
            },
        }

    def effects_for_current(self) -> tuple[int, EffectMatrices]:
        gv = self.current
        if gv.version not in self._effects_cache:
            self._effects_cache[gv.version] = total_effects(gv.graph)
        return gv.version, self._effects_cache[gv.version]

    # -- edits ---------------------------------------------------------------

    def apply_edit(self, edit: GraphEdit) -> tuple[EditResult, int | None]:
        gv = self.current
        result = validate_edit(gv.graph, edit, self.ontology)
        version = None
        if result.accepted:
            version = self._install_graph(result.graph, gv.dataset_id)
        self.edit_log.append(edit, result, version=version)
        self.memory.record(
            "episodic",
            {
                "event": "graph_edit",
                "kind": edit.kind,
                "accepted": result.accepted,
                "reason": result.reason,
                "version": version,
            },
        )
        return result, version

    # -- analysis --------------------------------------------------------------

    def graph_dataset(self) -> Dataset | None:
        """Dataset behind the current graph, else the latest upload."""
        if self.versions and self.versions[-1].dataset_id in self.datasets:
            return self.datasets[self.versions[-1].dataset_id]
        if self.datasets:
            last_id = f"ds-{self._counters['dataset']}"
            return self.datasets.get(last_id)
        return None

    def run_rca(
        self,
        frame: dict[str, float],
        target: str,
        k: int = 3,
        cycle_state: str | None = None,
        tolerances: ToleranceSpec | None = None,
    ) -> dict:
        tol = tolerances or self.tolerances
        if tol is None:
            raise DataError(
                "no tolerance bands available; run discovery or supply bands explicitly"
            )
        _, em = self.effects_for_current()
        report = detect_deviations(frame, tol, cycle_state=cycle_state)
        rca = rank_root_causes(report, em, target, k=k)
        self.last_rca = rca
        self.last_deviations = report.to_dict()
        self.memory.record(
            "episodic",
            {
                "event": "rca_completed",
                "target": target,
                "k": k,
                "top": list(rca.top()),
            },
        )
        return {"report": rca.to_dict(), "deviations": report.to_dict()}

    def answer(self, question: str) -> dict:
        gv = self.current
        state = EngineState(
            graph=gv.graph,
            effects=self.effects_for_current()[1],
            rca=self.last_rca,
            config=self.last_config,
            ontology=self.ontology if self.ontology.entities else None,
            dataset=self.graph_dataset(),
            memory=self.memory,
        )
        ans = answer_question(question, state)
        self.memory.record(
            "episodic",
            {
                "event": "question_answered",
                "question": question,
                "template_id": ans.template_id,
                "verdict": ans.verdict,
            },
        )
        return ans.to_dict()

    # -- replay -----------------------------------------------------------------

    def start_replay(self, dataset_id: str, rate: float | None = None, limit: int | None = None) -> ReplaySession:
        d = self.get_dataset(dataset_id)
        for session in self.replays.values():
            if not session.finished:
                raise DataError(f"replay {session.session_id} is still running; stop it first")
        session = ReplaySession(
            session_id=self._next_id("replay", "replay"),
            dataset_id=dataset_id,
            dataset=d,
            rate=rate if rate is not None else self.config.replay_rate,
            limit=limit,
            tolerances=self.tolerances,
        )
        self.replays[session.session_id] = session
        self.memory.record(
            "episodic",
            {
                "event": "replay_started",
                "session": session.session_id,
                "dataset_id": dataset_id,
                "rows": session.rows,
            },
        )
        session.start()
        return session

    def latest_replay(self) -> ReplaySession | None:
        if not self.replays:
            return None
        return self.replays[f"replay-{self._counters['replay']}"]

    def stop_replay(self) -> ReplaySession:
        session = self.latest_replay()
        if session is None:
            raise KeyError("no replay session exists")
        status = session.stop()
        self.memory.record(
            "episodic",
            {"event": "replay_stopped", "session": session.session_id, "status": status},
        )
        return session
