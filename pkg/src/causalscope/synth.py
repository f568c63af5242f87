"""Synthetic plant fixtures with known ground truth.

Linear structural models driven by uniform (non-Gaussian) noise, plus
fault injection and fixture serialization.  Three plant layouts are built
in: a production chain, a variant with a confounded non-ancestor sibling
(to expose correlation-only rankings), and a low-noise effect tree whose
near-flat marginals make intervention contrasts sharp.

Everything is seeded; per-layout default seeds are part of the fixture
definition so downstream evaluations are reproducible.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from causalscope.core.dataset import Dataset
from causalscope.core.graph import CausalGraph, EdgeRecord, stability_tier
from causalscope.effects.total import EffectMatrices, total_effects
from causalscope.errors import DataError
from causalscope.knowledge.ontology import OntologyStore
from causalscope.rca.tolerance import ToleranceSpec, detect_deviations, fit_tolerances

PLANT_KINDS = ("chain", "confounded", "effect_tree")

# (normal-data seed, fault-trial seed, rows) per layout.
PLANT_DEFAULTS: dict[str, tuple[int, int, int]] = {
    "chain": (11, 99, 5000),
    "confounded": (17, 5, 5000),
    "effect_tree": (1, 77, 10000),
}

REPLAY_RATE_HZ = 1.95

_UNITS = ("degC", "bar", "rpm", "mm", "V", "A", "kN", "Hz")
_DESCRIPTIONS = (
    "inlet temperature",
    "line pressure",
    "motor speed",
    "position offset",
    "supply voltage",
    "drive current",
    "clamp force",
    "vibration frequency",
)
_CYCLE_STATES = ("HEAT", "PRESS", "RELEASE")


def sample_sem(
    B: np.ndarray, n: int, rng: np.random.Generator, noise_scales=None
) -> np.ndarray:
    """Draw n rows from x = Bx + e with e ~ U[-1, 1] per component,
    optionally scaled per variable."""
    p = B.shape[0]
    e = rng.uniform(-1.0, 1.0, size=(n, p))
    if noise_scales is not None:
        e = e * np.asarray(noise_scales, dtype=float)
    T = np.linalg.inv(np.eye(p) - B)
    return e @ T.T


def random_dag(p: int, rng: np.random.Generator, n_edges: int | None = None) -> np.ndarray:
    """Random weighted DAG: random variable order, edges drawn without
    replacement from the pairs that respect it, weights +/- U(0.4, 0.9)."""
    order = rng.permutation(p)
    B = np.zeros((p, p))
    possible = [(order[i], order[j]) for i in range(p) for j in range(i)]
    if n_edges is None:
        n_edges = p + int(rng.integers(0, p // 2 + 1))
    idx = rng.choice(len(possible), size=min(n_edges, len(possible)), replace=False)
    for t in idx:
        i, j = possible[t]
        B[i, j] = rng.uniform(0.4, 0.9) * rng.choice([-1, 1])
    return B


def _plant_matrix(kind: str) -> tuple[np.ndarray, np.ndarray, str]:
    """Weight matrix, noise scales, and anomaly target for a layout."""
    p = 8
    B = np.zeros((p, p))
    scales = np.ones(p)
    if kind == "chain":
        for i, w in enumerate((0.85, 0.8, 0.9, 0.75, 0.85, 0.8, 0.9)):
            B[i + 1, i] = w
    elif kind == "confounded":
        # Backbone x1->x2->x3->x4->x6->x8 plus a confounder x5 driving both
        # x6 and x7; x7 correlates with the target without causing it.
        for i, j, w in (
            (1, 0, 0.85),
            (2, 1, 0.85),
            (3, 2, 0.85),
            (5, 3, 0.8),
            (7, 5, 0.9),
            (6, 4, 0.95),
            (5, 4, 0.6),
        ):
            B[i, j] = w
    elif kind == "effect_tree":
        # Shallow tree with small child noise: marginals stay near-flat, so
        # level-conditioned group means track predicted shifts closely.
        for i, j, w in (
            (1, 0, 0.8),
            (2, 0, 0.75),
            (3, 1, 0.8),
            (4, 1, 0.7),
            (5, 2, 0.8),
            (6, 2, 0.7),
            (7, 3, 0.75),
        ):
            B[i, j] = w
        scales = np.array([1.0] + [0.35] * 7)
    else:
        raise DataError(f"unknown plant kind {kind!r}; expected one of {PLANT_KINDS}")
    return B, scales, "x8"


@dataclass(frozen=True, eq=False)
class PlantFixture:
    kind: str
    names: tuple[str, ...]
    B: np.ndarray
    noise_scales: np.ndarray
    target: str
    dataset: Dataset
    tolerances: ToleranceSpec
    graph: CausalGraph
    effects: EffectMatrices
    ancestors: tuple[str, ...]
    seed: int

    @property
    def target_index(self) -> int:
        return self.names.index(self.target)


@dataclass(frozen=True)
class FaultTrial:
    index: int
    fault_variable: str
    frame: dict[str, float]
    truth: tuple[str, ...]


def _reachable_ancestors(B: np.ndarray, target: int) -> list[int]:
    """Indices with a directed path to the target, in variable order.
    Uses the pattern, not numeric total effects, so exact zeros are exact."""
    p = B.shape[0]
    parents = {i: list(np.flatnonzero(B[i])) for i in range(p)}
    seen: set[int] = set()
    stack = list(parents[target])
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        stack.extend(parents[u])
    return [j for j in range(p) if j in seen]


def make_plant(kind: str = "chain", n_rows: int | None = None, seed: int | None = None) -> PlantFixture:
    """Build a plant fixture: healthy dataset, fitted 3-sigma tolerance
    bands, and the ground-truth graph."""
    if kind not in PLANT_KINDS:
        raise DataError(f"unknown plant kind {kind!r}; expected one of {PLANT_KINDS}")
    default_seed, _, default_rows = PLANT_DEFAULTS[kind]
    seed = default_seed if seed is None else seed
    n_rows = default_rows if n_rows is None else n_rows
    B, scales, target = _plant_matrix(kind)
    p = B.shape[0]
    names = tuple(f"x{i+1}" for i in range(p))
    rng = np.random.default_rng(seed)
    values = sample_sem(B, n_rows, rng, noise_scales=scales)
    dataset = Dataset(
        variables=names,
        values=values,
        cycle_state=tuple(_CYCLE_STATES[i % len(_CYCLE_STATES)] for i in range(n_rows)),
        anomaly_label=tuple("" for _ in range(n_rows)),
        timestamps=np.arange(n_rows) / REPLAY_RATE_HZ,
    )
    tolerances = fit_tolerances(dataset, n_sigma=3.0)
    graph = CausalGraph.from_matrix(
        names, B, provenance={"method": "ground_truth", "kind": kind, "seed": seed}
    )
    effects = total_effects(graph)
    ancestors = tuple(names[j] for j in _reachable_ancestors(B, names.index(target)))
    return PlantFixture(
        kind=kind,
        names=names,
        B=B,
        noise_scales=scales,
        target=target,
        dataset=dataset,
        tolerances=tolerances,
        graph=graph,
        effects=effects,
        ancestors=ancestors,
        seed=seed,
    )


def make_fault_trials(
    plant: PlantFixture,
    n_trials: int = 50,
    seed: int | None = None,
    magnitude: tuple[float, float] = (8.0, 12.0),
) -> list[FaultTrial]:
    """Inject faults: each trial shifts the noise of one random ancestor of
    the target by U(magnitude) times that variable's healthy standard
    deviation, then propagates through the structure.  The truth set is
    every ancestor pushed outside its tolerance band."""
    _, default_trial_seed, _ = PLANT_DEFAULTS[plant.kind]
    seed = default_trial_seed if seed is None else seed
    p = len(plant.names)
    tgt = plant.target_index
    anc_idx = _reachable_ancestors(plant.B, tgt)
    if not anc_idx:
        raise DataError(f"target {plant.target!r} has no ancestors to fault")
    sd = plant.dataset.values.std(axis=0)
    T = np.linalg.inv(np.eye(p) - plant.B)
    rng = np.random.default_rng(seed)
    trials: list[FaultTrial] = []
    for t in range(n_trials):
        f = anc_idx[int(rng.integers(len(anc_idx)))]
        e = rng.uniform(-1.0, 1.0, p) * plant.noise_scales
        e[f] += rng.uniform(magnitude[0], magnitude[1]) * sd[f]
        row = T @ e
        frame = {plant.names[j]: float(row[j]) for j in range(p)}
        report = detect_deviations(frame, plant.tolerances)
        truth = tuple(
            sorted(plant.names[j] for j in anc_idx if report.dev(plant.names[j]) > 0.0)
        )
        trials.append(
            FaultTrial(
                index=t,
                fault_variable=plant.names[f],
                frame=frame,
                truth=truth,
            )
        )
    return trials


def synthetic_ontology(plant: PlantFixture) -> OntologyStore:
    """Ontology document for a plant: typed, described, unit-annotated
    entities plus one deny rule (indicator outputs must not drive sensors)."""
    entities: dict[str, dict] = {}
    for i, name in enumerate(plant.names):
        entities[name] = {
            "type": "sensor",
            "description": f"{_DESCRIPTIONS[i % len(_DESCRIPTIONS)]} at station {i + 1}",
            "unit": _UNITS[i % len(_UNITS)],
            "anomaly_relevance": "high" if name in (plant.target, *plant.ancestors) else "low",
        }
    # A non-sensor entity so edits can exercise the deny rule and unknown
    # endpoints stay testable.
    entities["quality_flag"] = {
        "type": "indicator",
        "description": "final part quality flag",
        "unit": "bool",
        "anomaly_relevance": "high",
    }
    return OntologyStore(
        entities=entities,
        deny_rules=frozenset({("indicator", "sensor")}),
        tolerances=plant.tolerances,
    )


def reference_answer(
    plant: PlantFixture, trial: FaultTrial, onto: OntologyStore | None = None
) -> str:
    """Expert-style reference sentence for a fault trial, used as the text
    target when scoring generated explanations."""
    fault = trial.fault_variable
    described = onto.describe(fault) if onto is not None else fault
    target_desc = onto.describe(plant.target) if onto is not None else plant.target
    return (
        f"The most likely root cause of the anomaly in {target_desc} is {described}: "
        f"its readings drifted outside the tolerance band and the deviation propagates "
        f"downstream to {plant.target}."
    )


def demo_graph() -> CausalGraph:
    """Small four-node graph (A -> B, B -> C, D -> B) with bootstrap-style
    edge metadata, used for question-answering demos and interface tests."""
    nodes = ("A", "B", "C", "D")
    B = np.zeros((4, 4))
    specs = [
        ("A", "B", 0.8, 0.08, 0.98),
        ("B", "C", 0.65, 0.18, 0.92),
        ("D", "B", -0.45, 0.35, 0.76),
    ]
    records = {}
    index = {n: i for i, n in enumerate(nodes)}
    for src, tgt, w, std, freq in specs:
        B[index[tgt], index[src]] = w
        stability = 1.0 / (1.0 + std)
        records[(src, tgt)] = EdgeRecord(
            source=src,
            target=tgt,
            weight=w,
            std=std,
            stability=stability,
            frequency=freq,
            tier=stability_tier(stability),
        )
    provenance = {
        "method": "lingam",
        "config": {"n_bootstrap": 100, "seed": 0},
        "bootstrap": {"n_bootstrap": 100, "n_failed": 0},
    }
    return CausalGraph.from_matrix(nodes, B, provenance=provenance, records=records)


def write_fixture_files(
    outdir: str | os.PathLike,
    kind: str = "chain",
    n_rows: int | None = None,
    seed: int | None = None,
    n_trials: int = 50,
) -> dict[str, str]:
    """Generate a full fixture bundle on disk.

    Writes plant.csv, truth_graph.json, tolerances.json, ontology.json,
    faults.json, and references.json; returns the path map.
    """
    outdir = os.fspath(outdir)
    os.makedirs(outdir, exist_ok=True)
    plant = make_plant(kind, n_rows=n_rows, seed=seed)
    trials = make_fault_trials(plant, n_trials=n_trials)
    onto = synthetic_ontology(plant)

    paths = {
        "plant.csv": os.path.join(outdir, "plant.csv"),
        "truth_graph.json": os.path.join(outdir, "truth_graph.json"),
        "tolerances.json": os.path.join(outdir, "tolerances.json"),
        "ontology.json": os.path.join(outdir, "ontology.json"),
        "faults.json": os.path.join(outdir, "faults.json"),
        "references.json": os.path.join(outdir, "references.json"),
    }
    with open(paths["plant.csv"], "w", encoding="utf-8") as fh:
        fh.write(plant.dataset.to_csv())
    with open(paths["truth_graph.json"], "w", encoding="utf-8") as fh:
        fh.write(plant.graph.to_json(indent=2) + "\n")
    with open(paths["tolerances.json"], "w", encoding="utf-8") as fh:
        fh.write(plant.tolerances.to_json(indent=2) + "\n")
    with open(paths["ontology.json"], "w", encoding="utf-8") as fh:
        fh.write(onto.to_json(indent=2) + "\n")
    with open(paths["faults.json"], "w", encoding="utf-8") as fh:
        json.dump(
            {
                "kind": kind,
                "target": plant.target,
                "trials": [
                    {
                        "index": t.index,
                        "fault_variable": t.fault_variable,
                        "frame": t.frame,
                        "truth": list(t.truth),
                    }
                    for t in trials
                ],
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    with open(paths["references.json"], "w", encoding="utf-8") as fh:
        json.dump(
            {str(t.index): reference_answer(plant, t, onto) for t in trials},
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    return paths
