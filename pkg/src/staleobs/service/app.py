"""HTTP+JSON API over the record store.

Endpoints::

    POST /patients                       create a patient (optional initial observations)
    GET  /patients/{id}                  fetch a record
    POST /patients/{id}/observations     submit a new observation -> update session
    GET  /sessions/{id}                  fetch a session
    POST /sessions/{id}/commit           apply reviewed decisions
    GET  /patients/{id}/predict?variable=X
    GET  /model                          network metadata

JSON field names mirror the domain types.  Errors come back as
``{"error": {"code", "message"}}``.  When an API token is configured every
request must carry it in the ``X-API-Token`` header.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from ..detection import DetectionError
from ..inference import InferenceError
from ..network import NetworkError, UnknownStateError, UnknownVariableError
from ..recommend import RecommendationTree, render_recommendation_tree
from .config import ServiceConfig
from .store import (
    ConflictError,
    PatientRecord,
    RecordStore,
    StoreError,
    UpdateSession,
    open_store,
)


class CreatePatientBody(BaseModel):
    patient_id: str | None = None
    observations: dict[str, dict[str, Any]] | None = None


class SubmitObservationBody(BaseModel):
    variable: str
    state: str
    timestamp: float | None = None


class CommitBody(BaseModel):
    decisions: dict[str, dict[str, str]] = {}


def record_json(record: PatientRecord) -> dict:
    return {
        "patient_id": record.patient_id,
        "observations": {
            "entries": {
                o.variable: {"state": o.state, "timestamp": o.timestamp}
                for o in record.observations
            }
        },
        "revision": record.revision,
        "audit_log": [
            {"timestamp": e.timestamp, "action": e.action, "digest": e.digest}
            for e in record.audit_log
        ],
    }


def recommendation_json(tree: RecommendationTree | None) -> dict | None:
    if tree is None:
        return None
    def leaf_json(leaf, with_posterior):
        body = {
            "variable": leaf.variable,
            "old_state": leaf.old_state,
            "proposed_state": leaf.proposed_state,
            "proposed_prob": leaf.proposed_prob,
            "timestamp": leaf.timestamp,
        }
        if with_posterior:
            body["posterior"] = leaf.posterior
        return body

    return {
        "groups": [
            {
                "and_set": [leaf_json(l, False) for l in g.and_set],
                "or_set": [leaf_json(l, True) for l in g.or_set],
            }
            for g in tree.groups
        ],
        "serialized": render_recommendation_tree(tree),
    }


def session_json(session: UpdateSession) -> dict:
    new = session.new_observation
    return {
        "session_id": session.session_id,
        "patient_id": session.patient_id,
        "new_observation": {
            "variable": new.variable,
            "state": new.state,
            "timestamp": new.timestamp,
        },
        "recommendation": recommendation_json(session.recommendation),
        "decisions": session.decisions,
        "state": session.state,
        "base_revision": session.base_revision,
        "follow_up": session.follow_up,
    }


def create_app(config: ServiceConfig, store: RecordStore | None = None) -> FastAPI:
    app = FastAPI(title="staleobs record service", version="0.1.0")
    store = store if store is not None else open_store(config)
    app.state.store = store
    app.state.config = config

    @app.middleware("http")
    async def check_token(request: Request, call_next):
        if config.api_token and request.headers.get("X-API-Token") != config.api_token:
            return JSONResponse(
                status_code=401,
                content={"error": {"code": "unauthorized", "message": "bad or missing token"}},
            )
        return await call_next(request)

    def error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})

    @app.exception_handler(NetworkError)
    async def network_error_handler(request: Request, exc: NetworkError):
        if isinstance(exc, ConflictError):
            return error(409, "conflict", str(exc))
        if isinstance(exc, StoreError):
            missing = "unknown patient" in str(exc) or "unknown session" in str(exc)
            return error(404 if missing else 422, "invalid", str(exc))
        if isinstance(exc, (UnknownVariableError, UnknownStateError, DetectionError)):
            return error(422, "invalid", str(exc))
        if isinstance(exc, InferenceError):
            return error(422, "inference_failed", str(exc))
        return error(422, "invalid", str(exc))

    @app.get("/model")
    def get_model():
        net = store.net
        return {
            "variables": [
                {
                    "name": v.name,
                    "states": list(v.states),
                    "description": v.description,
                    "parents": list(net.parents(v.name)),
                }
                for v in net.variables
            ],
            "edges": [list(e) for e in net.edges],
            "epsilon": store.epsilon,
        }

    @app.post("/patients", status_code=201)
    def create_patient(body: CreatePatientBody):
        record = store.create_patient(body.patient_id, body.observations)
        return record_json(record)

    @app.get("/patients/{patient_id}")
    def get_patient(patient_id: str):
        return record_json(store.get_record(patient_id))

    @app.post("/patients/{patient_id}/observations", status_code=201)
    def submit_observation(patient_id: str, body: SubmitObservationBody):
        session = store.submit_observation(patient_id, body.variable, body.state, body.timestamp)
        return session_json(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return session_json(store.get_session(session_id))

    @app.post("/sessions/{session_id}/commit")
    def commit_session(session_id: str, body: CommitBody):
        record, follow_up = store.commit_session(session_id, body.decisions)
        return {
            "record": record_json(record),
            "follow_up_session_id": follow_up,
            "session": session_json(store.get_session(session_id)),
        }

    @app.post("/sessions/{session_id}/abandon")
    def abandon_session(session_id: str):
        return session_json(store.abandon_session(session_id))

    @app.get("/patients/{patient_id}/predict")
    def get_prediction(patient_id: str, variable: str):
        prediction = store.get_prediction(patient_id, variable)
        return {
            "variable": prediction.variable,
            "state": prediction.state,
            "confidence": prediction.confidence,
        }

    return app
