"""Command-line interface.

Exit codes: 0 success, 2 usage error (argument parsing), 3 invalid or
insufficient data, 4 numerical failure.  With --json, errors are emitted
to stderr as a single JSON object instead of prose.
"""

from __future__ import annotations

import functools
import json
import sys

import click

from causalscope import __version__
from causalscope.core.dataset import Dataset, load_dataset_file
from causalscope.core.graph import CausalGraph
from causalscope.discovery.bootstrap import bootstrap_stability, filter_edges
from causalscope.discovery.lingam import DiscoveryConfig
from causalscope.effects.counterfactual import counterfactual_validate, results_to_csv
from causalscope.effects.total import total_effects
from causalscope.errors import DataError, NumericalError
from causalscope.knowledge.ontology import OntologyStore
from causalscope.qa.answers import EngineState, answer_question
from causalscope.rca import metrics
from causalscope.rca.ranking import RcaCandidate, RcaReport, correlation_baseline, rank_root_causes
from causalscope.rca.tolerance import ToleranceSpec, detect_deviations, fit_tolerances
from causalscope.service.state import EngineHub, HubConfig
from causalscope.synth import make_plant, write_fixture_files

EXIT_DATA = 3
EXIT_NUMERICAL = 4


def _fail(code: int, kind: str, message: str, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps({"error": kind, "message": message}), err=True)
    else:
        click.echo(f"error ({kind}): {message}", err=True)
    sys.exit(code)


def engine_errors(fn):
    """Translate engine exceptions into the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        as_json = click.get_current_context().obj.get("json", False)
        try:
            return fn(*args, **kwargs)
        except DataError as exc:
            _fail(EXIT_DATA, "data", str(exc), as_json)
        except NumericalError as exc:
            _fail(EXIT_NUMERICAL, "numerical", str(exc), as_json)

    return wrapper


def _read_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        click.echo(text, nl=not text.endswith("\n"))
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


@click.group(context_settings={"auto_envvar_prefix": "CAUSALSCOPE"})
@click.version_option(version=__version__, prog_name="causalscope")
@click.option("--json", "json_errors", is_flag=True, help="Emit errors as JSON on stderr.")
@click.pass_context
def main(ctx: click.Context, json_errors: bool) -> None:
    """Causal discovery, effect estimation, and root-cause analysis."""
    ctx.ensure_object(dict)
    ctx.obj["json"] = json_errors


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(exists=True), help="CSV dataset.")
@click.option("--config", "config_path", type=click.Path(exists=True), help="Discovery config JSON.")
@click.option("--seed", type=int, default=None, help="Override config seed.")
@click.option("--n-bootstrap", type=int, default=None, help="Override bootstrap replicate count.")
@click.option("--variables", type=str, default=None, help="Comma-separated variable subset.")
@click.option("--output", "-o", type=click.Path(), default="-", help="Graph JSON output (default stdout).")
@engine_errors
def discover(data_path, config_path, seed, n_bootstrap, variables, output):
    """Learn a causal graph with bootstrap edge stability."""
    d = load_dataset_file(data_path)
    if variables:
        d = d.subset([v.strip() for v in variables.split(",") if v.strip()])
    cfg_dict = _read_json(config_path) if config_path else {}
    if seed is not None:
        cfg_dict["seed"] = seed
    if n_bootstrap is not None:
        cfg_dict["n_bootstrap"] = n_bootstrap
    cfg = DiscoveryConfig.from_dict(cfg_dict)
    summary = bootstrap_stability(d, cfg)
    graph = filter_edges(summary, cfg)
    _write_text(output, graph.to_json(indent=2) + "\n")
    if output not in (None, "-"):
        click.echo(
            f"graph with {len(graph.edges)} edges over {len(graph.nodes)} nodes "
            f"({summary.n_failed}/{summary.n_bootstrap} replicates failed) -> {output}",
            err=True,
        )


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True), help="Graph JSON.")
@click.option("--source", type=str, default=None)
@click.option("--target", type=str, default=None)
@click.option("--output", "-o", type=click.Path(), default="-")
@engine_errors
def effects(graph_path, source, target, output):
    """Total effects for a graph; with --source/--target, one number."""
    g = CausalGraph.from_json(open(graph_path, encoding="utf-8").read())
    em = total_effects(g)
    if source is not None and target is not None:
        payload = {
            "source": source,
            "target": target,
            "tau": em.tau(source, target),
            "direct": em.direct(source, target),
        }
    elif source is not None:
        payload = {"source": source, "downstream": em.downstream(source)}
    else:
        payload = em.to_dict()
    _write_text(output, json.dumps(payload, indent=2, sort_keys=True) + "\n")


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--data", "data_path", required=True, type=click.Path(exists=True))
@click.option("--delta", type=float, default=0.05, show_default=True, help="Minimum |tau| to sweep.")
@click.option("--epsilon", type=float, default=None, help="Fixed level-matching half width.")
@click.option("--output", "-o", type=click.Path(), default="-", help="CSV report output.")
@engine_errors
def counterfactuals(graph_path, data_path, delta, epsilon, output):
    """Validate predicted shifts against observed group contrasts."""
    g = CausalGraph.from_json(open(graph_path, encoding="utf-8").read())
    d = load_dataset_file(data_path)
    em = total_effects(g)
    specs = None
    if epsilon is not None:
        from causalscope.effects.counterfactual import CounterfactualSpec

        specs = [
            CounterfactualSpec(source=a, target=b, epsilon=epsilon)
            for a in em.nodes
            for b in em.nodes
            if a != b and abs(em.tau(a, b)) > delta
        ]
    results = counterfactual_validate(d, em, specs=specs, delta=delta)
    _write_text(output, results_to_csv(results))


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--frame", "frame_path", type=click.Path(exists=True), help="JSON {variable: value}.")
@click.option("--data", "data_path", type=click.Path(exists=True), help="CSV for --row / band fitting.")
@click.option("--row", "row_index", type=int, default=None, help="Row of --data to analyze.")
@click.option("--target", required=True, type=str)
@click.option("-k", type=int, default=3, show_default=True)
@click.option("--tolerances", "tol_path", type=click.Path(exists=True), help="Tolerance band JSON.")
@click.option("--cycle-state", type=str, default=None)
@click.option("--output", "-o", type=click.Path(), default="-")
@engine_errors
def rca(graph_path, frame_path, data_path, row_index, target, k, tol_path, cycle_state, output):
    """Rank root-cause candidates for an anomalous frame."""
    g = CausalGraph.from_json(open(graph_path, encoding="utf-8").read())
    em = total_effects(g)
    if frame_path is not None:
        frame = {str(k_): float(v) for k_, v in _read_json(frame_path).items()}
    elif data_path is not None and row_index is not None:
        frame = load_dataset_file(data_path).row_frame(row_index)
    else:
        raise DataError("provide --frame, or --data together with --row")
    if tol_path is not None:
        tol = ToleranceSpec.from_json(open(tol_path, encoding="utf-8").read())
    elif data_path is not None:
        tol = fit_tolerances(load_dataset_file(data_path))
    else:
        raise DataError("provide --tolerances, or --data to fit bands from")
    report = detect_deviations(frame, tol, cycle_state=cycle_state)
    result = rank_root_causes(report, em, target, k=k)
    _write_text(output, result.to_json(indent=2) + "\n")


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--question", "-q", required=True, type=str)
@click.option("--rca-report", "rca_path", type=click.Path(exists=True), help="RcaReport JSON for root-cause questions.")
@click.option("--ontology", "onto_path", type=click.Path(exists=True))
@click.option("--data", "data_path", type=click.Path(exists=True), help="CSV for intervention baselines.")
@click.option("--text-only", is_flag=True, help="Print only the answer sentence.")
@engine_errors
def qa(graph_path, question, rca_path, onto_path, data_path, text_only):
    """Answer a natural-language question about the graph."""
    g = CausalGraph.from_json(open(graph_path, encoding="utf-8").read())
    rca_report = None
    if rca_path is not None:
        raw = _read_json(rca_path)

        def parse_cands(items):
            return tuple(
                RcaCandidate(
                    variable=c["variable"],
                    score=float(c["score"]),
                    dev=float(c["dev"]),
                    path_strength=float(c["path_strength"]),
                    explanation=str(c["explanation"]),
                )
                for c in items
            )

        rca_report = RcaReport(
            target=raw["target"],
            k=int(raw["k"]),
            method=raw.get("method", "causal"),
            candidates=parse_cands(raw.get("candidates", [])),
            all_ranked=parse_cands(raw.get("all_ranked", raw.get("candidates", []))),
        )
    state = EngineState(
        graph=g,
        rca=rca_report,
        ontology=OntologyStore.from_file(onto_path) if onto_path else None,
        dataset=load_dataset_file(data_path) if data_path else None,
    )
    answer = answer_question(question, state)
    if text_only:
        click.echo(answer.text)
    else:
        click.echo(json.dumps(answer.to_dict(), indent=2, sort_keys=True))


@main.command("gen-synthetic")
@click.option("--outdir", required=True, type=click.Path())
@click.option(
    "--kind",
    type=click.Choice(["chain", "confounded", "effect_tree"]),
    default="chain",
    show_default=True,
)
@click.option("--rows", type=int, default=None, help="Healthy rows (layout default if omitted).")
@click.option("--seed", type=int, default=None, help="Data seed (layout default if omitted).")
@click.option("--trials", type=int, default=50, show_default=True, help="Fault trials.")
@engine_errors
def gen_synthetic(outdir, kind, rows, seed, trials):
    """Write a synthetic plant fixture bundle with known ground truth."""
    paths = write_fixture_files(outdir, kind=kind, n_rows=rows, seed=seed, n_trials=trials)
    for name, path in sorted(paths.items()):
        click.echo(f"{name}: {path}")


@main.command()
@click.option("--fixtures", "fixtures_dir", required=True, type=click.Path(exists=True), help="Directory from gen-synthetic.")
@click.option(
    "--mode",
    type=click.Choice(["rca_full", "rca_no_ontology", "correlation_baseline"]),
    default="rca_full",
    show_default=True,
)
@click.option("-k", type=int, default=3, show_default=True, help="Cutoff for set metrics.")
@click.option("--output", "-o", type=click.Path(), default="-")
@engine_errors
def evaluate(fixtures_dir, mode, k, output):
    """Score root-cause rankings and explanations against fixture truth."""
    import os

    import numpy as np

    graph = CausalGraph.from_json(
        open(os.path.join(fixtures_dir, "truth_graph.json"), encoding="utf-8").read()
    )
    d = load_dataset_file(os.path.join(fixtures_dir, "plant.csv"))
    tol = ToleranceSpec.from_json(
        open(os.path.join(fixtures_dir, "tolerances.json"), encoding="utf-8").read()
    )
    onto = OntologyStore.from_file(os.path.join(fixtures_dir, "ontology.json"))
    faults = _read_json(os.path.join(fixtures_dir, "faults.json"))
    references = _read_json(os.path.join(fixtures_dir, "references.json"))
    target = faults["target"]
    trials = faults["trials"]
    em = total_effects(graph)

    rankings: list[list[str]] = []
    truths: list[set[str]] = []
    rouge_f1: list[float] = []
    question = f"What is the most likely root cause of the anomalous value of variable {target}?"

    if mode == "correlation_baseline":
        frames = np.array([[t["frame"][n] for n in d.variables] for t in trials])
        combined = Dataset(variables=d.variables, values=np.vstack([d.values, frames]))
        for t in trials:
            report = correlation_baseline(combined, target, k=k)
            rankings.append(list(c.variable for c in report.all_ranked))
            truths.append(set(t["truth"]))
            top = report.all_ranked[0].variable if report.all_ranked else "none"
            text = f"The most likely root cause of the anomaly in {target} is {top}."
            rouge_f1.append(metrics.rouge1(text, references[str(t["index"])]).f1)
    else:
        ontology_for_text = onto if mode == "rca_full" else None
        for t in trials:
            frame = {str(k_): float(v) for k_, v in t["frame"].items()}
            dev_report = detect_deviations(frame, tol)
            report = rank_root_causes(dev_report, em, target, k=k)
            rankings.append(list(c.variable for c in report.all_ranked))
            truths.append(set(t["truth"]))
            state = EngineState(graph=graph, rca=report, ontology=ontology_for_text)
            text = answer_question(question, state).text
            rouge_f1.append(metrics.rouge1(text, references[str(t["index"])]).f1)

    payload = {
        "mode": mode,
        "k": k,
        "n_trials": len(trials),
        "mrr": metrics.mrr(rankings, truths),
        "precision_at_2": metrics.mean_precision_at_k(rankings, truths, 2),
        "map_at_3": metrics.map_at_k(rankings, truths, 3),
        f"jaccard_at_{k}": metrics.mean_jaccard_at_k(rankings, truths, k),
        "rouge1_f1_mean": sum(rouge_f1) / len(rouge_f1) if rouge_f1 else 0.0,
    }
    _write_text(output, json.dumps(payload, indent=2, sort_keys=True) + "\n")


@main.command()
@click.option("--host", type=str, default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--state-dir", type=click.Path(), default=None, help="Edit log and memory location.")
@click.option("--ontology", "onto_path", type=click.Path(exists=True), default=None)
@click.option("--replay-rate", type=float, default=1.95, show_default=True, help="Default replay rate in Hz.")
@click.option("--wall-clock-memory", is_flag=True, help="Timestamp memory with wall time instead of a logical counter.")
@engine_errors
def serve(host, port, state_dir, onto_path, replay_rate, wall_clock_memory):
    """Run the HTTP service."""
    import uvicorn

    from causalscope.service.app import create_app

    hub = EngineHub(
        HubConfig(
            state_dir=state_dir,
            ontology=OntologyStore.from_file(onto_path) if onto_path else None,
            wall_clock_memory=wall_clock_memory,
            replay_rate=replay_rate,
        )
    )
    uvicorn.run(create_app(hub), host=host, port=port)


if __name__ == "__main__":
    main()
