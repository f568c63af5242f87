"""HTTP interface.

Thin request/response translation over the hub; no causal arithmetic lives
here.  Every JSON response is serialized canonically (sorted keys, compact
separators), so an identical call sequence produces identical bytes.

Status mapping: 400 malformed request payload, 404 unknown resource,
409 rejected graph edit (body carries {reason, message}), 422 failed
precondition or invalid data.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse
from pydantic import BaseModel, ConfigDict

from causalscope.discovery.lingam import DiscoveryConfig
from causalscope.effects.counterfactual import CounterfactualSpec, counterfactual_validate
from causalscope.effects.total import default_levels, predict_intervention
from causalscope.errors import DataError, EngineError, NumericalError
from causalscope.knowledge.edits import GraphEdit
from causalscope.rca.tolerance import ToleranceSpec
from causalscope.service.state import EngineHub, HubConfig


def canonical(payload, status_code: int = 200) -> Response:
    return Response(
        content=json.dumps(payload, sort_keys=True, separators=(",", ":")),
        status_code=status_code,
        media_type="application/json",
    )


def _error(status_code: int, reason: str, message: str) -> Response:
    return canonical({"reason": reason, "message": message}, status_code=status_code)


class DatasetRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    csv: str


class FeatureRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    dataset_id: str
    method: str = "variance_rank"
    k: int | None = None
    names: list[str] | None = None


class DiscoverRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    dataset_id: str
    config: dict | None = None
    variables: list[str] | None = None


class EditRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: str
    node: str | None = None
    source: str | None = None
    target: str | None = None
    weight: float | None = None
    author: str = ""
    timestamp: float = 0.0


class WhatIfRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    source: str
    value: float | None = None
    a1: float | None = None
    a2: float | None = None


class CounterfactualPair(BaseModel):
    model_config = ConfigDict(extra="forbid")
    source: str
    target: str
    a1: float | None = None
    a2: float | None = None
    epsilon: float | None = None


class CounterfactualRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    specs: list[CounterfactualPair] | None = None
    delta: float = 0.05
    rel_tol: float = 0.1
    std_tol: float = 0.05


class RcaRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    target: str
    k: int = 3
    frame: dict[str, float] | None = None
    dataset_id: str | None = None
    row_index: int | None = None
    cycle_state: str | None = None
    tolerances: dict | None = None


class QaRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    question: str


class ReplayStartRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    dataset_id: str
    rate: float | None = None
    limit: int | None = None


def create_app(hub: EngineHub | None = None, config: HubConfig | None = None) -> FastAPI:
    hub = hub or EngineHub(config)
    app = FastAPI(title="causalscope", docs_url=None, redoc_url=None)
    app.state.hub = hub
    # The operator UI may be served from a different origin than the API;
    # CORS headers never touch response bodies, so canonical byte-for-byte
    # serialization is unaffected.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def malformed_payload(request: Request, exc: RequestValidationError):
        # Schema violations are the client's problem: 400, not the
        # framework default 422 (which is reserved for preconditions).
        return _error(400, "schema", str(exc.errors()[0].get("msg", "invalid request")))

    @app.exception_handler(KeyError)
    async def unknown_resource(request: Request, exc: KeyError):
        return _error(404, "unknown_resource", str(exc.args[0]) if exc.args else "unknown resource")

    @app.exception_handler(DataError)
    async def bad_data(request: Request, exc: DataError):
        return _error(422, "data", str(exc))

    @app.exception_handler(NumericalError)
    async def numerical(request: Request, exc: NumericalError):
        return _error(422, "numerical", str(exc))

    @app.exception_handler(NotImplementedError)
    async def unimplemented(request: Request, exc: NotImplementedError):
        return _error(422, "unimplemented", str(exc))

    @app.exception_handler(EngineError)
    async def engine_error(request: Request, exc: EngineError):
        return _error(422, "engine", str(exc))

    @app.post("/datasets")
    async def post_dataset(request: Request):
        content_type = request.headers.get("content-type", "")
        body = await request.body()
        if "text/csv" in content_type:
            csv_payload: str | bytes = body
        else:
            try:
                parsed = DatasetRequest.model_validate_json(body)
            except Exception:
                return _error(400, "schema", "expected {'csv': ...} JSON or a text/csv body")
            csv_payload = parsed.csv
        dataset_id, d = hub.add_dataset(csv_payload)
        return canonical(
            {
                "dataset_id": dataset_id,
                "variables": list(d.variables),
                "rows": d.rows,
                "dropped_rows": d.dropped_rows,
                "has_cycle_state": d.cycle_state is not None,
                "has_anomaly_label": d.anomaly_label is not None,
                "has_timestamps": d.timestamps is not None,
            }
        )

    @app.post("/features")
    def post_features(req: FeatureRequest):
        selection = hub.run_feature_selection(req.dataset_id, req.method, req.k, req.names)
        return canonical(selection.to_dict())

    @app.post("/discover")
    def post_discover(req: DiscoverRequest):
        cfg = DiscoveryConfig.from_dict(req.config) if req.config else DiscoveryConfig()
        job = hub.run_discovery(req.dataset_id, cfg, req.variables)
        return canonical(job.to_dict())

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        return canonical(hub.get_job(job_id).to_dict())

    @app.get("/graph")
    def get_graph():
        return canonical(hub.graph_payload())

    @app.post("/graph/edits")
    def post_edit(req: EditRequest):
        edit = GraphEdit(
            kind=req.kind,
            node=req.node,
            source=req.source,
            target=req.target,
            weight=req.weight,
            author=req.author,
            timestamp=req.timestamp,
        )
        result, version = hub.apply_edit(edit)
        if not result.accepted:
            return canonical({"reason": result.reason, "message": result.message}, status_code=409)
        return canonical(
            {"accepted": True, "message": result.message, "version": version, "graph": result.graph.to_dict()}
        )

    @app.get("/effects")
    def get_effects():
        version, em = hub.effects_for_current()
        return canonical({"version": version, **em.to_dict()})

    @app.post("/whatif")
    def post_whatif(req: WhatIfRequest):
        version, em = hub.effects_for_current()
        if req.a1 is not None and req.a2 is not None:
            a1, a2 = req.a1, req.a2
        elif req.value is not None:
            d = hub.graph_dataset()
            if d is not None and req.source in d.variables:
                a1 = float(d.column(req.source).mean())
            else:
                a1 = 0.0
            a2 = req.value
        else:
            raise DataError("what-if needs either 'value' or both 'a1' and 'a2'")
        shifts = predict_intervention(em, req.source, a1, a2)
        taus = {n: em.tau(req.source, n) for n in em.nodes if n != req.source}
        return canonical(
            {
                "version": version,
                "source": req.source,
                "a1": a1,
                "a2": a2,
                "shifts": shifts,
                "tau": taus,
            }
        )

    @app.post("/counterfactuals")
    def post_counterfactuals(req: CounterfactualRequest):
        version, em = hub.effects_for_current()
        d = hub.graph_dataset()
        if d is None:
            raise DataError("no dataset available for counterfactual validation")
        specs = None
        if req.specs is not None:
            specs = [
                CounterfactualSpec(
                    source=s.source, target=s.target, a1=s.a1, a2=s.a2, epsilon=s.epsilon
                )
                for s in req.specs
            ]
        results = counterfactual_validate(
            d, em, specs=specs, delta=req.delta, rel_tol=req.rel_tol, std_tol=req.std_tol
        )
        return canonical({"version": version, "results": [r.to_dict() for r in results]})

    @app.post("/rca")
    def post_rca(req: RcaRequest):
        if req.frame is not None:
            frame = req.frame
        elif req.dataset_id is not None and req.row_index is not None:
            frame = hub.get_dataset(req.dataset_id).row_frame(req.row_index)
        else:
            raise DataError("RCA needs either 'frame' or ('dataset_id' and 'row_index')")
        tol = ToleranceSpec.from_dict(req.tolerances) if req.tolerances else None
        payload = hub.run_rca(
            frame, req.target, k=req.k, cycle_state=req.cycle_state, tolerances=tol
        )
        return canonical(payload)

    @app.post("/qa")
    def post_qa(req: QaRequest):
        return canonical(hub.answer(req.question))

    @app.get("/memory")
    def get_memory(kind: str | None = None, since: float | None = None, until: float | None = None):
        records = hub.memory.recall(kind=kind, since=since, until=until)
        return canonical({"records": [r.to_dict() for r in records]})

    @app.post("/replay/start")
    def post_replay_start(req: ReplayStartRequest):
        session = hub.start_replay(req.dataset_id, rate=req.rate, limit=req.limit)
        return canonical(
            {
                "session_id": session.session_id,
                "dataset_id": session.dataset_id,
                "rows": session.rows,
                "rate": session.rate,
                "status": session.status,
            }
        )

    @app.post("/replay/stop")
    def post_replay_stop():
        session = hub.stop_replay()
        return canonical(
            {
                "session_id": session.session_id,
                "status": session.status,
                "events_buffered": len(session.events),
            }
        )

    @app.get("/stream")
    def get_stream():
        session = hub.latest_replay()
        if session is None:
            raise KeyError("no replay session exists")
        return StreamingResponse(session.sse_stream(), media_type="text/event-stream")

    return app
