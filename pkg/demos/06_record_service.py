"""The record service: submit observations, review contradictions, commit.

Runs the HTTP API in-process.  For a real deployment:
    python -m staleobs.service --config service.json --port 8321
"""

import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from staleobs.models import AUTONOMY_CASE_OBSERVATIONS, load_autonomy_fragment
from staleobs.service import RecordStore, ServiceConfig, create_app

storage = Path(tempfile.mkdtemp()) / "records.jsonl"
config = ServiceConfig(storage=str(storage))
store = RecordStore(load_autonomy_fragment(), config.storage, config.epsilon)
client = TestClient(create_app(config, store=store))

# Seed the patient with the stored profile.
observations = {
    v: {"state": s, "timestamp": 1_700_000_000 + 3_600 * i}
    for i, (v, s) in enumerate(AUTONOMY_CASE_OBSERVATIONS)
}
record = client.post(
    "/patients", json={"patient_id": "mrs-wilson", "observations": observations}
).json()
print(f"created patient, revision {record['revision']}, "
      f"{len(record['observations']['entries'])} observations")

# The contradictory news opens a review session.
session = client.post(
    "/patients/mrs-wilson/observations",
    json={"variable": "autonomyLoss", "state": "lost", "timestamp": 1_700_100_000},
).json()
print(f"\nsubmitted autonomyLoss=lost -> session {session['state']}")
print(session["recommendation"]["serialized"])

# Clinician decisions: resolve all AND leaves, delete the top OR suspect.
decisions = {}
for group in session["recommendation"]["groups"]:
    for leaf in group["and_set"]:
        decisions[leaf["variable"]] = {"action": "replace", "state": leaf["proposed_state"]}
    if group["or_set"]:
        decisions[group["or_set"][0]["variable"]] = {"action": "delete"}
print(f"decisions: {decisions}")

result = client.post(f"/sessions/{session['session_id']}/commit", json={"decisions": decisions}).json()
print(f"\ncommitted: revision {result['record']['revision']}, "
      f"follow-up session: {result['follow_up_session_id']}")

entries = result["record"]["observations"]["entries"]
print("record now holds:")
for variable, entry in sorted(entries.items()):
    print(f"  {variable} = {entry['state']}")

# Predictions answer on-demand questions from the stored record.
prediction = client.get(
    "/patients/mrs-wilson/predict", params={"variable": "muscleImpairment"}
).json()
print(f"\npredicted {prediction['variable']} = {prediction['state']} "
      f"(confidence {prediction['confidence']:.2f})")

# The audit log replays to exactly the stored state.
replayed = store.replay_observations("mrs-wilson")
current = store.get_record("mrs-wilson").observations
print(f"\naudit replay matches stored record: {replayed == current}")
