import json
import threading

import pytest
from fastapi.testclient import TestClient

from staleobs.detection import NewObservation, is_contradictory
from staleobs.models import AUTONOMY_CASE_OBSERVATIONS, autonomy_case, load_autonomy_fragment
from staleobs.service import ConflictError, RecordStore, ServiceConfig, StoreError, create_app
from staleobs.service.config import load_config

EPS = 1e-2


@pytest.fixture(scope="module")
def fragment():
    return load_autonomy_fragment()


@pytest.fixture
def store(fragment, tmp_path):
    return RecordStore(fragment, tmp_path / "records.jsonl", EPS)


def initial_observations():
    return {
        v: {"state": s, "timestamp": 1_700_000_000 + 3_600 * i}
        for i, (v, s) in enumerate(AUTONOMY_CASE_OBSERVATIONS)
    }


def seed_patient(store):
    return store.create_patient("mrs-wilson", initial_observations())


# ---------------------------------------------------------------- store


def test_consistent_observation_autocommits(store, fragment):
    record = store.create_patient("p1", {"dementia": {"state": "yes", "timestamp": 1.0}})
    assert record.revision == 0
    session = store.submit_observation("p1", "strokeTIA", "yes", 2.0)
    assert session.state == "committed"
    record = store.get_record("p1")
    assert record.revision == 1
    assert record.observations.get("strokeTIA").state == "yes"


def test_duplicate_observation_rejected(store):
    store.create_patient("p1", {"dementia": {"state": "yes", "timestamp": 1.0}})
    with pytest.raises(ConflictError, match="duplicate"):
        store.submit_observation("p1", "dementia", "yes", 2.0)


def test_unknown_patient_and_state(store):
    with pytest.raises(StoreError, match="unknown patient"):
        store.submit_observation("ghost", "dementia", "yes")
    store.create_patient("p1")
    with pytest.raises(Exception):
        store.submit_observation("p1", "dementia", "sideways")


def test_contradiction_opens_session_with_tree(store):
    seed_patient(store)
    session = store.submit_observation("mrs-wilson", "autonomyLoss", "lost", 1_700_100_000)
    assert session.state == "open"
    assert session.recommendation is not None
    or_groups = [g for g in session.recommendation.groups if g.or_set]
    assert [l.variable for l in or_groups[0].or_set][0] == "muscleImpairment"
    # record untouched while the session is open
    assert store.get_record("mrs-wilson").revision == 0


def valid_decisions(session):
    decisions = {}
    for group in session.recommendation.groups:
        for leaf in group.and_set:
            decisions[leaf.variable] = {"action": "replace", "state": leaf.proposed_state}
        if group.or_set:
            first = group.or_set[0]
            decisions[first.variable] = {"action": "replace", "state": first.proposed_state}
    return decisions


def test_commit_applies_and_passes_sweep(store, fragment):
    seed_patient(store)
    session = store.submit_observation("mrs-wilson", "autonomyLoss", "lost", 1_700_100_000)
    record, follow_up = store.commit_session(session.session_id, valid_decisions(session))
    assert record.revision == 1
    assert follow_up is None
    assert record.observations.get("autonomyLoss").state == "lost"
    # post-commit sweep: replaying every stored value as new stays consistent
    for obs in record.observations:
        rest = record.observations.without(obs.variable)
        assert not is_contradictory(
            fragment, rest, NewObservation(obs.variable, obs.state, obs.timestamp), EPS
        )


def test_commit_requires_and_leaves_resolved(store):
    seed_patient(store)
    session = store.submit_observation("mrs-wilson", "autonomyLoss", "lost", 1_700_100_000)
    decisions = valid_decisions(session)
    # leave one certainly-obsolete leaf unresolved
    removed = next(
        leaf.variable for g in session.recommendation.groups for leaf in g.and_set
    )
    del decisions[removed]
    with pytest.raises(StoreError, match="certainly-obsolete"):
        store.commit_session(session.session_id, decisions)
    # atomic: nothing changed
    assert store.get_record("mrs-wilson").revision == 0
    assert store.get_session(session.session_id).state == "open"


def test_commit_requires_one_or_leaf(store):
    seed_patient(store)
    session = store.submit_observation("mrs-wilson", "autonomyLoss", "lost", 1_700_100_000)
    decisions = valid_decisions(session)
    for group in session.recommendation.groups:
        for leaf in group.or_set:
            decisions.pop(leaf.variable, None)
    with pytest.raises(StoreError, match="OR set"):
        store.commit_session(session.session_id, decisions)


def test_stale_revision_rejected(store):
    seed_patient(store)
    first = store.submit_observation("mrs-wilson", "autonomyLoss", "lost", 1_700_100_000)
    second = store.submit_observation("mrs-wilson", "autonomyLoss", "lost", 1_700_100_001)
    store.commit_session(first.session_id, valid_decisions(first))
    with pytest.raises(ConflictError, match="stale revision"):
        store.commit_session(second.session_id, valid_decisions(second))


def test_replay_reproduces_observations(store):
    seed_patient(store)
    session = store.submit_observation("mrs-wilson", "autonomyLoss", "lost", 1_700_100_000)
    store.commit_session(session.session_id, valid_decisions(session))
    current = store.get_record("mrs-wilson").observations
    assert store.replay_observations("mrs-wilson") == current


def test_store_survives_restart(fragment, tmp_path):
    path = tmp_path / "records.jsonl"
    store = RecordStore(fragment, path, EPS)
    seed_patient(store)
    session = store.submit_observation("mrs-wilson", "autonomyLoss", "lost", 1_700_100_000)
    reopened = RecordStore(fragment, path, EPS)
    assert reopened.get_record("mrs-wilson").observations == store.get_record(
        "mrs-wilson"
    ).observations
    restored = reopened.get_session(session.session_id)
    assert restored.state == "open"
    assert restored.recommendation is not None


def test_abandon_session(store):
    seed_patient(store)
    session = store.submit_observation("mrs-wilson", "autonomyLoss", "lost", 1_700_100_000)
    store.abandon_session(session.session_id)
    assert store.get_session(session.session_id).state == "abandoned"
    with pytest.raises(ConflictError):
        store.commit_session(session.session_id, {})


def test_prediction_paths(store, fragment):
    store.create_patient("p-empty")
    pred = store.get_prediction("p-empty", "autonomyLoss")
    assert pred.state == "kept"
    seed_patient(store)
    with pytest.raises(StoreError, match="already observed"):
        store.get_prediction("mrs-wilson", "livesAlone")
    partial = store.create_patient(
        "p-partial",
        {v: {"state": s, "timestamp": float(i)} for i, (v, s) in enumerate(AUTONOMY_CASE_OBSERVATIONS[:-2])},
    )
    pred = store.get_prediction("p-partial", "livesAlone")
    assert 0.0 < pred.confidence <= 1.0


def test_concurrent_submissions_conflict_cleanly(store):
    seed_patient(store)
    sessions = []
    errors = []

    def submit(ts):
        try:
            sessions.append(
                store.submit_observation("mrs-wilson", "autonomyLoss", "lost", ts)
            )
        except Exception as exc:  # pragma: no cover - depends on timing
            errors.append(exc)

    threads = [threading.Thread(target=submit, args=(1_700_100_000 + i,)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(sessions) + len(errors) == 4
    opened = [s for s in sessions if s.state == "open"]
    committed = []
    for s in opened:
        try:
            committed.append(store.commit_session(s.session_id, valid_decisions(s)))
        except ConflictError:
            pass
    assert len(committed) == 1  # exactly one commit wins the revision race


# ---------------------------------------------------------------- HTTP API


@pytest.fixture
def client(fragment, tmp_path):
    config = ServiceConfig(storage=str(tmp_path / "api.jsonl"))
    store = RecordStore(fragment, config.storage, config.epsilon)
    app = create_app(config, store=store)
    return TestClient(app)


def test_api_model_metadata(client):
    body = client.get("/model").json()
    names = {v["name"] for v in body["variables"]}
    assert "autonomyLoss" in names and body["epsilon"] == EPS
    lives = next(v for v in body["variables"] if v["name"] == "livesAlone")
    assert set(lives["parents"]) == {"autonomyLoss", "dementia"}


def test_api_round_trip_worked_case(client):
    created = client.post(
        "/patients", json={"patient_id": "mrs-wilson", "observations": initial_observations()}
    )
    assert created.status_code == 201
    assert created.json()["revision"] == 0

    resp = client.post(
        "/patients/mrs-wilson/observations",
        json={"variable": "autonomyLoss", "state": "lost", "timestamp": 1_700_100_000},
    )
    assert resp.status_code == 201
    session = resp.json()
    assert session["state"] == "open"
    tree = session["recommendation"]
    or_leaves = [g["or_set"] for g in tree["groups"] if g["or_set"]][0]
    assert or_leaves[0]["variable"] == "muscleImpairment"
    assert tree["serialized"].startswith("AND")

    decisions = {}
    for group in tree["groups"]:
        for leaf in group["and_set"]:
            decisions[leaf["variable"]] = {"action": "replace", "state": leaf["proposed_state"]}
        if group["or_set"]:
            leaf = group["or_set"][0]
            decisions[leaf["variable"]] = {"action": "delete"}
    commit = client.post(f"/sessions/{session['session_id']}/commit", json={"decisions": decisions})
    assert commit.status_code == 200
    body = commit.json()
    assert body["record"]["revision"] == 1
    assert body["follow_up_session_id"] is None
    entries = body["record"]["observations"]["entries"]
    assert entries["autonomyLoss"]["state"] == "lost"
    assert "muscleImpairment" not in entries  # deleted OR leaf

    fetched = client.get("/patients/mrs-wilson").json()
    assert fetched == body["record"]


def test_api_error_shapes(client):
    assert client.get("/patients/ghost").status_code == 404
    assert client.get("/sessions/ghost").status_code == 404
    client.post("/patients", json={"patient_id": "p1"})
    bad = client.post(
        "/patients/p1/observations", json={"variable": "dementia", "state": "sideways"}
    )
    assert bad.status_code == 422
    assert "error" in bad.json()
    client.post(
        "/patients/p1/observations", json={"variable": "dementia", "state": "yes"}
    )
    dup = client.post(
        "/patients/p1/observations", json={"variable": "dementia", "state": "yes"}
    )
    assert dup.status_code == 409
    assert dup.json()["error"]["code"] == "conflict"


def test_api_predict(client):
    client.post("/patients", json={"patient_id": "p1"})
    resp = client.get("/patients/p1/predict", params={"variable": "autonomyLoss"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["variable"] == "autonomyLoss" and body["state"] == "kept"
    assert 0.0 < body["confidence"] <= 1.0
    client.post("/patients/p1/observations", json={"variable": "autonomyLoss", "state": "kept"})
    observed = client.get("/patients/p1/predict", params={"variable": "autonomyLoss"})
    assert observed.status_code == 422


def test_api_token_gate(fragment, tmp_path):
    config = ServiceConfig(storage=str(tmp_path / "tok.jsonl"), api_token="sekret")
    store = RecordStore(fragment, config.storage, config.epsilon)
    client = TestClient(create_app(config, store=store))
    assert client.get("/model").status_code == 401
    assert client.get("/model", headers={"X-API-Token": "sekret"}).status_code == 200


def test_config_env_overrides(tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"epsilon": 0.05, "storage": "a.jsonl"}))
    config = load_config(str(cfg_file), environ={"STALEOBS_EPSILON": "0.02"})
    assert config.epsilon == 0.02
    assert config.storage == "a.jsonl"
    assert config.network.startswith("builtin:")
    net = config.load_model()
    assert "autonomyLoss" in net.names
