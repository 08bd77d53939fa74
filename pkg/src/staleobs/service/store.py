"""Event-sourced patient record store with optimistic concurrency.

All state changes append a JSON event to a single log file before they touch
memory (write-ahead), so replaying the log from revision 0 reproduces every
record exactly.  Records carry monotonically increasing revisions; a session
commit is rejected when its base revision is stale.  Per-patient writes are
serialised with a lock, reads are lock-free on immutable snapshots.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ..detection import NewObservation, Observation, ObservationSet, detect, is_contradictory
from ..network import Network, NetworkError
from ..recommend import RecommendationTree, predict, recommend
from .config import ServiceConfig


class StoreError(NetworkError):
    """Invalid request against the record store."""


class ConflictError(StoreError):
    """Optimistic-concurrency conflict or duplicate state."""


@dataclass(frozen=True)
class AuditEntry:
    timestamp: float
    action: str
    digest: str


@dataclass(frozen=True)
class PatientRecord:
    patient_id: str
    observations: ObservationSet
    revision: int
    audit_log: tuple[AuditEntry, ...]


# decision actions per tree leaf
KEEP = "keep"
DELETE = "delete"
REPLACE = "replace"


@dataclass
class UpdateSession:
    session_id: str
    patient_id: str
    new_observation: NewObservation
    recommendation: RecommendationTree | None
    decisions: dict[str, dict[str, str]]
    state: str  # open | committed | abandoned
    base_revision: int
    follow_up: str | None = None


def _digest(payload: Any) -> str:
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()[:16]


class RecordStore:
    """Patient records plus pending update sessions over one network."""

    def __init__(self, net: Network, storage: str | Path, epsilon: float):
        self.net = net
        self.epsilon = epsilon
        self.path = Path(storage)
        self._records: dict[str, PatientRecord] = {}
        self._sessions: dict[str, UpdateSession] = {}
        self._lock = threading.Lock()
        self._patient_locks: dict[str, threading.Lock] = {}
        if self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    self._apply(json.loads(line))

    # -- event plumbing ---------------------------------------------------

    def _patient_lock(self, patient_id: str) -> threading.Lock:
        with self._lock:
            return self._patient_locks.setdefault(patient_id, threading.Lock())

    def _append(self, event: dict) -> None:
        line = json.dumps(event, sort_keys=True, separators=(",", ":"))
        with self._lock:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
        self._apply(event)

    def _apply(self, event: dict) -> None:
        kind = event["event"]
        ts = event["ts"]
        if kind == "patient_created":
            observations = ObservationSet(
                Observation(v, d["state"], d["timestamp"])
                for v, d in event["observations"].items()
            )
            entry = AuditEntry(ts, "patient_created", _digest(event["observations"]))
            self._records[event["patient_id"]] = PatientRecord(
                patient_id=event["patient_id"],
                observations=observations,
                revision=0,
                audit_log=(entry,),
            )
        elif kind == "observations_committed":
            record = self._records[event["patient_id"]]
            observations = record.observations
            for variable in event["deleted"]:
                observations = observations.without(variable)
            for variable, d in event["upserts"].items():
                observations = observations.without(variable).with_observation(
                    Observation(variable, d["state"], d["timestamp"])
                )
            entry = AuditEntry(
                ts,
                "observations_committed",
                _digest({"deleted": event["deleted"], "upserts": event["upserts"]}),
            )
            self._records[event["patient_id"]] = PatientRecord(
                patient_id=record.patient_id,
                observations=observations,
                revision=record.revision + 1,
                audit_log=record.audit_log + (entry,),
            )
        elif kind == "session_opened":
            new = event["new_observation"]
            self._sessions[event["session_id"]] = UpdateSession(
                session_id=event["session_id"],
                patient_id=event["patient_id"],
                new_observation=NewObservation(new["variable"], new["state"], new["timestamp"]),
                recommendation=None,  # rebuilt below
                decisions={},
                state="open",
                base_revision=event["base_revision"],
            )
            session = self._sessions[event["session_id"]]
            record = self._records[session.patient_id]
            obs_prime = record.observations.without(session.new_observation.variable)
            tree = detect(self.net, obs_prime, session.new_observation, self.epsilon)
            if tree is not None:
                session.recommendation = recommend(self.net, tree, session.new_observation)
        elif kind == "session_closed":
            session = self._sessions.get(event["session_id"])
            if session is not None:
                session.state = event["state"]
                session.follow_up = event.get("follow_up")
        else:
            raise StoreError(f"unknown event kind {kind!r}")

    # -- queries ------------------------------------------------------------

    def get_record(self, patient_id: str) -> PatientRecord:
        try:
            return self._records[patient_id]
        except KeyError:
            raise StoreError(f"unknown patient {patient_id!r}") from None

    def get_session(self, session_id: str) -> UpdateSession:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise StoreError(f"unknown session {session_id!r}") from None

    def patient_ids(self) -> list[str]:
        return sorted(self._records)

    def replay_observations(self, patient_id: str) -> ObservationSet:
        """Rebuild a patient's observation set purely from the on-disk log."""
        observations = ObservationSet()
        seen = False
        if not self.path.exists():
            raise StoreError("no event log on disk")
        for line in self.path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            event = json.loads(line)
            if event.get("patient_id") != patient_id:
                continue
            if event["event"] == "patient_created":
                seen = True
                observations = ObservationSet(
                    Observation(v, d["state"], d["timestamp"])
                    for v, d in event["observations"].items()
                )
            elif event["event"] == "observations_committed":
                for variable in event["deleted"]:
                    observations = observations.without(variable)
                for variable, d in event["upserts"].items():
                    observations = observations.without(variable).with_observation(
                        Observation(variable, d["state"], d["timestamp"])
                    )
        if not seen:
            raise StoreError(f"unknown patient {patient_id!r}")
        return observations

    # -- commands -----------------------------------------------------------

    def create_patient(
        self, patient_id: str | None = None, observations: dict[str, dict] | None = None
    ) -> PatientRecord:
        patient_id = patient_id or f"p-{uuid.uuid4().hex[:8]}"
        payload: dict[str, dict] = {}
        for variable, d in (observations or {}).items():
            state = d["state"]
            self.net.check_assignment({variable: state})
            payload[variable] = {
                "state": state,
                "timestamp": float(d.get("timestamp", time.time())),
            }
        with self._patient_lock(patient_id):
            if patient_id in self._records:
                raise ConflictError(f"patient {patient_id!r} already exists")
            self._append(
                {
                    "event": "patient_created",
                    "ts": time.time(),
                    "patient_id": patient_id,
                    "observations": payload,
                }
            )
        return self.get_record(patient_id)

    def submit_observation(
        self, patient_id: str, variable: str, state: str, timestamp: float | None = None
    ) -> UpdateSession:
        """Run detection for a new observation.

        A consistent observation is committed immediately and the returned
        session is already in state ``committed``.  A contradictory one opens
        a session carrying the annotated recommendation tree for review.
        """
        self.net.check_assignment({variable: state})
        timestamp = float(timestamp if timestamp is not None else time.time())
        new = NewObservation(variable, state, timestamp)
        with self._patient_lock(patient_id):
            record = self.get_record(patient_id)
            stored = record.observations.get(variable)
            if stored is not None and stored.state == state:
                raise ConflictError(
                    f"duplicate observation: {variable}={state} already stored"
                )
            obs_prime = record.observations.without(variable)
            tree = detect(self.net, obs_prime, new, self.epsilon)
            session_id = f"u-{uuid.uuid4().hex[:12]}"
            if tree is None:
                self._append(
                    {
                        "event": "observations_committed",
                        "ts": time.time(),
                        "patient_id": patient_id,
                        "deleted": [],
                        "upserts": {variable: {"state": state, "timestamp": timestamp}},
                    }
                )
                session = UpdateSession(
                    session_id=session_id,
                    patient_id=patient_id,
                    new_observation=new,
                    recommendation=None,
                    decisions={},
                    state="committed",
                    base_revision=self.get_record(patient_id).revision,
                )
                self._sessions[session_id] = session
                return session
            self._append(
                {
                    "event": "session_opened",
                    "ts": time.time(),
                    "patient_id": patient_id,
                    "session_id": session_id,
                    "base_revision": record.revision,
                    "new_observation": {
                        "variable": variable,
                        "state": state,
                        "timestamp": timestamp,
                    },
                }
            )
            return self.get_session(session_id)

    def _validate_decisions(
        self, session: UpdateSession, decisions: dict[str, dict[str, str]]
    ) -> dict[str, tuple[str, str | None]]:
        assert session.recommendation is not None
        normalized: dict[str, tuple[str, str | None]] = {}
        leaves = {leaf.variable: leaf for leaf in session.recommendation.leaves}
        for variable, d in decisions.items():
            if variable not in leaves:
                raise StoreError(f"decision for unknown leaf {variable!r}")
            action = d.get("action", KEEP)
            if action not in (KEEP, DELETE, REPLACE):
                raise StoreError(f"unknown action {action!r} for {variable!r}")
            state = d.get("state")
            if action == REPLACE:
                if not state:
                    raise StoreError(f"replace decision for {variable!r} needs a state")
                self.net.check_assignment({variable: state})
            normalized[variable] = (action, state)
        for group in session.recommendation.groups:
            for leaf in group.and_set:
                action = normalized.get(leaf.variable, (KEEP, None))[0]
                if action == KEEP:
                    raise StoreError(
                        "all certainly-obsolete observations must be resolved: "
                        f"{leaf.variable!r} still kept"
                    )
            if group.or_set:
                if all(
                    normalized.get(leaf.variable, (KEEP, None))[0] == KEEP
                    for leaf in group.or_set
                ):
                    names = [leaf.variable for leaf in group.or_set]
                    raise StoreError(
                        f"at least one observation of the OR set {names} must be resolved"
                    )
        return normalized

    def commit_session(
        self, session_id: str, decisions: dict[str, dict[str, str]]
    ) -> tuple[PatientRecord, str | None]:
        """Apply reviewed decisions atomically; returns the new record and
        the id of a follow-up session when residual contradictions remain."""
        session = self.get_session(session_id)
        with self._patient_lock(session.patient_id):
            if session.state != "open":
                raise ConflictError(f"session {session_id!r} is {session.state}")
            record = self.get_record(session.patient_id)
            if record.revision != session.base_revision:
                raise ConflictError(
                    f"stale revision: session base {session.base_revision}, "
                    f"record at {record.revision}"
                )
            normalized = self._validate_decisions(session, decisions)
            commit_ts = time.time()
            deleted = [v for v, (action, _) in normalized.items() if action == DELETE]
            upserts: dict[str, dict] = {}
            for variable, (action, state) in normalized.items():
                if action == REPLACE:
                    upserts[variable] = {"state": state, "timestamp": commit_ts}
            new = session.new_observation
            upserts[new.variable] = {"state": new.state, "timestamp": new.timestamp}
            self._append(
                {
                    "event": "observations_committed",
                    "ts": commit_ts,
                    "patient_id": session.patient_id,
                    "deleted": deleted,
                    "upserts": upserts,
                }
            )
            session.decisions = {
                v: {"action": a, **({"state": s} if s else {})}
                for v, (a, s) in normalized.items()
            }
            follow_up = self._post_commit_sweep(session.patient_id)
            self._append(
                {
                    "event": "session_closed",
                    "ts": time.time(),
                    "session_id": session_id,
                    "state": "committed",
                    "follow_up": follow_up,
                }
            )
            return self.get_record(session.patient_id), follow_up

    def _post_commit_sweep(self, patient_id: str) -> str | None:
        """Replay every stored observation as new against the others; any
        residual contradiction opens a follow-up session."""
        record = self.get_record(patient_id)
        for obs in record.observations:
            rest = record.observations.without(obs.variable)
            replayed = NewObservation(obs.variable, obs.state, obs.timestamp)
            if is_contradictory(self.net, rest, replayed, self.epsilon):
                session_id = f"u-{uuid.uuid4().hex[:12]}"
                self._append(
                    {
                        "event": "session_opened",
                        "ts": time.time(),
                        "patient_id": patient_id,
                        "session_id": session_id,
                        "base_revision": record.revision,
                        "new_observation": {
                            "variable": obs.variable,
                            "state": obs.state,
                            "timestamp": obs.timestamp,
                        },
                    }
                )
                return session_id
        return None

    def abandon_session(self, session_id: str) -> UpdateSession:
        session = self.get_session(session_id)
        with self._patient_lock(session.patient_id):
            if session.state != "open":
                raise ConflictError(f"session {session_id!r} is {session.state}")
            self._append(
                {
                    "event": "session_closed",
                    "ts": time.time(),
                    "session_id": session_id,
                    "state": "abandoned",
                }
            )
            return session

    def get_prediction(self, patient_id: str, variable: str):
        record = self.get_record(patient_id)
        if variable in record.observations:
            raise StoreError(f"variable {variable!r} is already observed")
        return predict(self.net, record.observations, variable)


def open_store(config: ServiceConfig) -> RecordStore:
    return RecordStore(config.load_model(), config.storage, config.epsilon)
