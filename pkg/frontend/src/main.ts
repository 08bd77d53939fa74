// Browser entry point: observation form backed by the model metadata, then
// the review-and-commit loop for contradictory submissions.

import { ApiClient, ApiError } from "./api.js";
import { SessionView } from "./session.js";
import {
  renderConfirmation,
  renderError,
  renderObservationForm,
  renderRecommendationTree,
  statesFor,
} from "./render.js";
import type { Decision, ModelInfo, SessionPayload } from "./types.js";

const api = new ApiClient(
  (window as unknown as { STALEOBS_API?: string }).STALEOBS_API ?? "",
);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

let model: ModelInfo;
let view: SessionView | null = null;

function patientId(): string {
  return (el<HTMLInputElement>("patient")).value.trim();
}

function showTree(): void {
  if (!view) return;
  el("workspace").innerHTML = renderRecommendationTree(view);
  if (view.readOnly) return;
  for (const leaf of view.leaves()) {
    const variable = leaf.leaf.variable;
    wireDecision(`keep-${variable}`, variable, { action: "keep" });
    wireDecision(`delete-${variable}`, variable, { action: "delete" });
    wireDecision(`replace-${variable}`, variable, {
      action: "replace",
      state: leaf.leaf.proposed_state,
    });
  }
  const commit = document.getElementById("commit");
  commit?.addEventListener("click", () => void commitDecisions());
}

function wireDecision(id: string, variable: string, decision: Decision): void {
  document.getElementById(id)?.addEventListener("change", () => {
    view?.toggleDecision(variable, decision);
    showTree();
  });
}

async function commitDecisions(): Promise<void> {
  if (!view || !view.canCommit()) return;
  try {
    const result = await api.commitSession(view.sessionId, view.decisionsPayload());
    view = new SessionView(result.session, model);
    el("workspace").innerHTML =
      renderRecommendationTree(view) +
      renderConfirmation(result.session, result.record.revision) +
      (result.follow_up_session_id
        ? renderError(
            "residual_contradiction",
            `follow-up review opened: ${result.follow_up_session_id}`,
          )
        : "");
  } catch (error) {
    showError(error);
  }
}

function showError(error: unknown): void {
  if (error instanceof ApiError) {
    el("messages").innerHTML = renderError(error.code, error.message, error.staleRevision);
  } else {
    el("messages").innerHTML = renderError("client_error", String(error));
  }
}

async function submitObservation(event: Event): Promise<void> {
  event.preventDefault();
  el("messages").innerHTML = "";
  const variable = el<HTMLSelectElement>("variable").value;
  const state = el<HTMLSelectElement>("state").value;
  try {
    const payload: SessionPayload = await api.submitObservation(patientId(), variable, state);
    view = new SessionView(payload, model);
    if (payload.state === "committed") {
      const record = await api.getPatient(patientId());
      el("workspace").innerHTML = renderConfirmation(payload, record.revision);
    } else {
      showTree();
    }
  } catch (error) {
    showError(error);
  }
}

function refreshStates(): void {
  const variable = el<HTMLSelectElement>("variable").value;
  el<HTMLSelectElement>("state").innerHTML = statesFor(model, variable)
    .map((s) => `<option value="${s}">${s}</option>`)
    .join("");
}

async function boot(): Promise<void> {
  model = await api.getModel();
  el("form-slot").innerHTML = renderObservationForm(model);
  refreshStates();
  el("variable").addEventListener("change", refreshStates);
  el("observation-form").addEventListener("submit", (e) => void submitObservation(e));
}

void boot().catch(showError);
