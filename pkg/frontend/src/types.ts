// Wire types mirroring the record-service JSON (field names match the API).

export interface ModelVariable {
  name: string;
  states: string[];
  description: string;
  parents: string[];
}

export interface ModelInfo {
  variables: ModelVariable[];
  edges: string[][];
  epsilon: number;
}

export interface RecommendationLeaf {
  variable: string;
  old_state: string;
  proposed_state: string;
  proposed_prob: number;
  timestamp: number;
  /** posterior of the stored value given the new observation; OR leaves only */
  posterior?: number;
}

export interface RecommendationGroup {
  and_set: RecommendationLeaf[];
  or_set: RecommendationLeaf[];
}

export interface Recommendation {
  groups: RecommendationGroup[];
  serialized: string;
}

export interface NewObservation {
  variable: string;
  state: string;
  timestamp: number;
}

export type SessionState = "open" | "committed" | "abandoned";

export interface SessionPayload {
  session_id: string;
  patient_id: string;
  new_observation: NewObservation;
  recommendation: Recommendation | null;
  decisions: Record<string, { action: string; state?: string }>;
  state: SessionState;
  base_revision: number;
  follow_up: string | null;
}

export interface ObservationEntry {
  state: string;
  timestamp: number;
}

export interface PatientRecord {
  patient_id: string;
  observations: { entries: Record<string, ObservationEntry> };
  revision: number;
  audit_log: { timestamp: number; action: string; digest: string }[];
}

export type Decision =
  | { action: "keep" }
  | { action: "delete" }
  | { action: "replace"; state: string };

export interface CommitResponse {
  record: PatientRecord;
  follow_up_session_id: string | null;
  session: SessionPayload;
}
