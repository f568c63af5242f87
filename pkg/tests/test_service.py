"""HTTP service contract: determinism, error mapping, endpoint flows."""

import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from causalscope.core.dataset import Dataset
from causalscope.service.app import create_app
from causalscope.service.state import EngineHub, HubConfig
from causalscope.synth import make_plant, synthetic_ontology

CFG = {"seed": 0, "n_bootstrap": 6}


@pytest.fixture(scope="module")
def plant():
    return make_plant("chain", n_rows=400, seed=3)


def fresh_client(tmp_path, plant, name="a"):
    hub = EngineHub(
        HubConfig(state_dir=str(tmp_path / name), ontology=synthetic_ontology(plant))
    )
    return TestClient(create_app(hub))


def upload(client, plant):
    r = client.post(
        "/datasets", content=plant.dataset.to_csv(), headers={"content-type": "text/csv"}
    )
    assert r.status_code == 200, r.text
    return r.json()["dataset_id"]


def discover(client, ds, cfg=CFG):
    r = client.post("/discover", json={"dataset_id": ds, "config": cfg})
    assert r.status_code == 200, r.text
    return r.json()


class TestDeterminism:
    def script(self, client, plant):
        """upload -> discover -> 3 edits (one rejected) -> rca; returns every
        response body in order plus the final graph bytes."""
        bodies = []
        ds = upload(client, plant)
        bodies.append(discover(client, ds))

        edits = [
            {"kind": "remove_edge", "source": plant.names[0], "target": plant.names[1],
             "author": "op", "timestamp": 10.0},
            {"kind": "add_edge", "source": plant.names[0], "target": plant.names[2],
             "weight": 0.25, "author": "op", "timestamp": 11.0},
            # rejected: would close a cycle
            {"kind": "add_edge", "source": plant.target, "target": plant.names[0],
             "author": "op", "timestamp": 12.0},
        ]
        for e in edits:
            bodies.append(client.post("/graph/edits", json=e).json())

        frame = dict.fromkeys(plant.names, 0.0)
        frame[plant.names[3]] = 1e6
        r = client.post("/rca", json={"target": plant.target, "k": 3, "frame": frame})
        assert r.status_code == 200, r.text
        bodies.append(r.json())
        graph = client.get("/graph")
        return bodies, graph.content

    def test_request_log_replays_byte_for_byte(self, tmp_path, plant):
        c1 = fresh_client(tmp_path, plant, "one")
        c2 = fresh_client(tmp_path, plant, "two")
        bodies1, graph1 = self.script(c1, plant)
        bodies2, graph2 = self.script(c2, plant)
        assert bodies1 == bodies2
        assert graph1 == graph2

    def test_rejected_edit_does_not_bump_version(self, tmp_path, plant):
        client = fresh_client(tmp_path, plant)
        ds = upload(client, plant)
        discover(client, ds)
        before = client.get("/graph").json()["version"]
        r = client.post(
            "/graph/edits",
            json={"kind": "add_edge", "source": plant.target,
                  "target": plant.names[0], "author": "op", "timestamp": 1.0},
        )
        assert r.status_code == 409
        assert r.json()["reason"] == "cycle"
        assert client.get("/graph").json()["version"] == before

    def test_responses_are_canonical_json(self, tmp_path, plant):
        client = fresh_client(tmp_path, plant)
        ds = upload(client, plant)
        discover(client, ds)
        for path in ("/graph", "/effects"):
            raw = client.get(path).content.decode()
            canonical = json.dumps(json.loads(raw), sort_keys=True, separators=(",", ":"))
            assert raw == canonical


class TestErrorMapping:
    def test_schema_violation_is_400(self, tmp_path, plant):
        client = fresh_client(tmp_path, plant)
        r = client.post("/discover", json={"dataset_id": "x", "bogus_field": 1})
        assert r.status_code == 400
        assert r.json()["reason"] == "schema"

    def test_unknown_resource_is_404(self, tmp_path, plant):
        client = fresh_client(tmp_path, plant)
        assert client.get("/jobs/job-99").status_code == 404
        assert client.get("/graph").status_code == 404
        r = client.post("/discover", json={"dataset_id": "ds-77"})
        assert r.status_code == 404

    def test_bad_data_is_422(self, tmp_path, plant):
        client = fresh_client(tmp_path, plant)
        r = client.post("/datasets", json={"csv": ""})
        assert r.status_code == 422
        assert r.json()["reason"] == "data"

    def test_bad_discovery_config_is_422(self, tmp_path, plant):
        client = fresh_client(tmp_path, plant)
        ds = upload(client, plant)
        r = client.post("/discover", json={"dataset_id": ds, "config": {"method": "psl"}})
        assert r.status_code == 422
        assert r.json()["reason"] == "data"

    def test_numerical_failure_surfaces_as_failed_job(self, tmp_path, plant):
        # fitting failures are a job outcome, not a transport error
        client = fresh_client(tmp_path, plant)
        rng = np.random.default_rng(0)
        x = rng.uniform(-1, 1, 300)
        collinear = Dataset(
            variables=("a", "b", "c"),
            values=np.column_stack([x, 2.0 * x, rng.uniform(-1, 1, 300)]),
        )
        ds = upload_raw(client, collinear)
        r = client.post("/discover", json={"dataset_id": ds, "config": CFG})
        assert r.status_code == 200
        job = r.json()
        assert job["status"] == "failed"
        assert "NumericalError" in job["error"]
        assert client.get(f"/jobs/{job['job_id']}").json()["status"] == "failed"
        # no graph was installed by the failed run
        assert client.get("/graph").status_code == 404

    def test_unimplemented_method_fails_the_job(self, tmp_path, plant):
        client = fresh_client(tmp_path, plant)
        ds = upload(client, plant)
        r = client.post("/discover", json={"dataset_id": ds, "config": {"method": "diffan"}})
        assert r.status_code == 200
        assert r.json()["status"] == "failed"
        assert "NotImplementedError" in r.json()["error"]


def upload_raw(client, dataset):
    r = client.post(
        "/datasets", content=dataset.to_csv(), headers={"content-type": "text/csv"}
    )
    assert r.status_code == 200, r.text
    return r.json()["dataset_id"]


class TestFlows:
    def test_cross_origin_requests_allowed(self, tmp_path, plant):
        # The browser UI may be served from a different origin than the API.
        client = fresh_client(tmp_path, plant)
        r = client.get("/memory", headers={"origin": "http://localhost:8000"})
        assert r.status_code == 200
        assert r.headers["access-control-allow-origin"] == "*"
        pre = client.options(
            "/whatif",
            headers={
                "origin": "http://localhost:8000",
                "access-control-request-method": "POST",
            },
        )
        assert pre.status_code == 200
        assert "POST" in pre.headers["access-control-allow-methods"]

    def test_jobs_record_discovery(self, tmp_path, plant):
        client = fresh_client(tmp_path, plant)
        ds = upload(client, plant)
        job = discover(client, ds)
        assert job["status"] == "done"
        fetched = client.get(f"/jobs/{job['job_id']}").json()
        assert fetched == job

    def test_graph_payload_carries_annotations(self, tmp_path, plant):
        client = fresh_client(tmp_path, plant)
        ds = upload(client, plant)
        discover(client, ds)
        g = client.get("/graph").json()
        assert g["dataset_id"] == ds
        assert set(g["annotations"]["nodes"]) == set(plant.names)
        tips = g["annotations"]["edge_tooltips"]
        assert tips and {"source", "target", "text"} <= set(tips[0])

    def test_effects_cache_tracks_versions(self, tmp_path, plant):
        client = fresh_client(tmp_path, plant)
        ds = upload(client, plant)
        discover(client, ds)
        v1 = client.get("/effects").json()["version"]
        client.post(
            "/graph/edits",
            json={"kind": "remove_edge", "source": plant.names[0],
                  "target": plant.names[1], "author": "op", "timestamp": 1.0},
        )
        eff = client.get("/effects").json()
        assert eff["version"] == v1 + 1
        assert len(eff["T"]) == len(plant.names)

    def test_whatif_value_mode_uses_dataset_mean(self, tmp_path, plant):
        client = fresh_client(tmp_path, plant)
        ds = upload(client, plant)
        discover(client, ds)
        src = plant.names[0]
        r = client.post("/whatif", json={"source": src, "value": 2.0}).json()
        assert r["a1"] == pytest.approx(float(plant.dataset.column(src).mean()))
        assert r["a2"] == 2.0
        explicit = client.post(
            "/whatif", json={"source": src, "a1": 0.0, "a2": 1.0}
        ).json()
        for tgt, tau in explicit["tau"].items():
            assert explicit["shifts"].get(tgt, 0.0) == pytest.approx(tau)

    def test_counterfactuals_endpoint(self, tmp_path, plant):
        client = fresh_client(tmp_path, plant)
        ds = upload(client, plant)
        discover(client, ds)
        r = client.post("/counterfactuals", json={"delta": 0.3})
        assert r.status_code == 200
        body = r.json()
        assert body["results"]
        row = body["results"][0]
        assert {"source", "target", "tau", "verdict"} <= set(row)

    def test_qa_and_memory_flow(self, tmp_path, plant):
        client = fresh_client(tmp_path, plant)
        ds = upload(client, plant)
        discover(client, ds)
        frame = dict.fromkeys(plant.names, 0.0)
        frame[plant.names[0]] = 1e5
        client.post("/rca", json={"target": plant.target, "k": 3, "frame": frame})
        q = f"What is the most likely root cause of the anomalous value of variable {plant.target}?"
        a = client.post("/qa", json={"question": q}).json()
        assert a["verdict"] == "value"

        records = client.get("/memory").json()["records"]
        kinds = {r["kind"] for r in records}
        assert kinds == {"episodic"}
        events = [r["payload"]["event"] for r in records]
        assert any("dataset" in e for e in events)
        assert any("discovery" in e or "graph" in e for e in events)
        # logical clock: strictly increasing integers, no wall time
        stamps = [r["timestamp"] for r in records]
        assert stamps == sorted(stamps)
        assert all(float(t).is_integer() for t in stamps)

    def test_features_endpoint(self, tmp_path, plant):
        client = fresh_client(tmp_path, plant)
        ds = upload(client, plant)
        r = client.post(
            "/features", json={"dataset_id": ds, "method": "variance_rank", "k": 3}
        )
        assert r.status_code == 200
        assert len(r.json()["selected"]) == 3

    def test_replay_over_http(self, tmp_path, plant):
        client = fresh_client(tmp_path, plant)
        ds = upload(client, plant)
        r = client.post("/replay/start", json={"dataset_id": ds, "rate": 500.0, "limit": 3})
        assert r.status_code == 200
        sid = r.json()["session_id"]

        events = []
        with client.stream("GET", "/stream", params={"session_id": sid}) as s:
            for line in s.iter_lines():
                if line.startswith("event: "):
                    events.append(line[len("event: "):])
                if line == "event: end":
                    pass
                if events and events[-1] == "end" and line == "":
                    break
        assert events[0] == "handshake"
        assert events.count("row") == 3
        assert events[-1] == "end"

        stop = client.post("/replay/stop", json={"session_id": sid}).json()
        assert stop["status"] in {"complete", "stopped"}
        # second session can start once the first is finished
        r2 = client.post("/replay/start", json={"dataset_id": ds, "rate": 500.0, "limit": 1})
        assert r2.status_code == 200
        client.post("/replay/stop", json={"session_id": r2.json()["session_id"]})

    def test_stream_rows_carry_deviation_reports(self, tmp_path, plant):
        client = fresh_client(tmp_path, plant)
        ds = upload(client, plant)
        client.post("/replay/start", json={"dataset_id": ds, "rate": 500.0, "limit": 2})

        rows = []
        with client.stream("GET", "/stream") as s:
            kind = None
            for line in s.iter_lines():
                if line.startswith("event: "):
                    kind = line[len("event: "):]
                elif line.startswith("data: ") and kind == "row":
                    rows.append(json.loads(line[len("data: "):]))
                if kind == "end" and line == "":
                    break
        client.post("/replay/stop", json={})

        assert len(rows) == 2
        for event in rows:
            report = event["deviations"]
            assert set(report["entries"]) == set(plant.names)
            for var, entry in report["entries"].items():
                assert entry["value"] == event["values"][var]
                assert entry["lower"] < entry["upper"]
                assert entry["dev"] >= 0.0
                assert entry["direction"] in {"inside", "above", "below"}

    def test_only_one_running_replay(self, tmp_path, plant):
        client = fresh_client(tmp_path, plant)
        ds = upload(client, plant)
        r1 = client.post("/replay/start", json={"dataset_id": ds, "rate": 0.5})
        assert r1.status_code == 200
        r2 = client.post("/replay/start", json={"dataset_id": ds, "rate": 0.5})
        assert r2.status_code == 422
        client.post("/replay/stop", json={"session_id": r1.json()["session_id"]})
