// A canned session payload shaped like the worked autonomy-loss case.

import type { ModelInfo, SessionPayload } from "../src/types.js";

export function workedSession(state: SessionPayload["state"] = "open"): SessionPayload {
  return {
    session_id: "u-test",
    patient_id: "mrs-wilson",
    new_observation: { variable: "autonomyLoss", state: "lost", timestamp: 1_700_100_000 },
    recommendation: {
      groups: [
        {
          and_set: [],
          or_set: [
            leaf("muscleImpairment", "no", "no", 0.51, 0.337),
            leaf("strokeTIA", "no", "no", 0.66, 0.664),
            leaf("dementia", "no", "no", 0.81, 0.812),
            leaf("parkinson", "no", "no", 0.84, 0.843),
          ],
        },
        { and_set: [leaf("doShopping", "weekly", "never", 0.9), leaf("driveCar", "weekly", "never", 0.97)], or_set: [] },
        { and_set: [leaf("getUpAlone", "yes", "no", 0.98)], or_set: [] },
        { and_set: [leaf("livesAlone", "yes", "no", 0.97)], or_set: [] },
      ],
      serialized: "AND\n  GROUP\n",
    },
    decisions: {},
    state,
    base_revision: 0,
    follow_up: null,
  };
}

function leaf(
  variable: string,
  oldState: string,
  proposed: string,
  proposedProb: number,
  posterior?: number,
) {
  return {
    variable,
    old_state: oldState,
    proposed_state: proposed,
    proposed_prob: proposedProb,
    timestamp: 1_700_000_000,
    ...(posterior === undefined ? {} : { posterior }),
  };
}

export const miniModel: ModelInfo = {
  variables: [
    { name: "muscleImpairment", states: ["no", "yes"], description: "", parents: [] },
    { name: "livesAlone", states: ["no", "yes"], description: "", parents: [] },
  ],
  edges: [],
  epsilon: 0.01,
};
