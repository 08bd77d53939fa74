// HTML rendering for the recommendation tree and the observation form.
// Pure string builders: the browser entry point wires events by element id,
// and the tests can assert on structure without a DOM.

import type { ModelInfo, SessionPayload } from "./types.js";
import type { LeafView, SessionView } from "./session.js";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function pct(p: number): string {
  return (100 * p).toFixed(1) + "%";
}

function leafControls(view: LeafView, readOnly: boolean): string {
  const v = esc(view.leaf.variable);
  const decision = view.decision.action;
  if (readOnly) {
    return `<span class="decision">${esc(decision)}</span>`;
  }
  const keepSel = decision === "keep" ? " checked" : "";
  const delSel = decision === "delete" ? " checked" : "";
  const repSel = decision === "replace" ? " checked" : "";
  return (
    `<label><input type="radio" name="d-${v}" id="keep-${v}" value="keep"${keepSel}> keep</label>` +
    `<label><input type="radio" name="d-${v}" id="delete-${v}" value="delete"${delSel}> delete</label>` +
    `<label><input type="radio" name="d-${v}" id="replace-${v}" value="replace"${repSel}> ` +
    `replace with <b>${esc(view.leaf.proposed_state)}</b> (${pct(view.leaf.proposed_prob)})</label>`
  );
}

function leafHtml(view: LeafView, readOnly: boolean): string {
  const leaf = view.leaf;
  const badge =
    view.kind === "and"
      ? `<span class="badge mandatory" title="certainly obsolete">must update</span>`
      : `<span class="badge optional">p_x=${leaf.posterior === undefined ? "?" : leaf.posterior.toFixed(4)}</span>`;
  return (
    `<li class="leaf ${view.kind}${view.answered ? " answered" : " unanswered"}" ` +
    `data-variable="${esc(leaf.variable)}" data-kind="${view.kind}" data-position="${view.position}">` +
    `${badge} <code>${esc(leaf.variable)} = ${esc(leaf.old_state)}</code> ` +
    leafControls(view, readOnly) +
    `</li>`
  );
}

export function renderRecommendationTree(view: SessionView): string {
  const payload = view.payload;
  const recommendation = payload.recommendation;
  if (!recommendation) {
    return `<section class="tree empty">no contradiction: observation was committed directly</section>`;
  }
  const readOnly = view.readOnly;
  const leaves = view.leaves();
  const groups = recommendation.groups
    .map((group, index) => {
      const andLeaves = leaves.filter((l) => l.groupIndex === index && l.kind === "and");
      const orLeaves = leaves.filter((l) => l.groupIndex === index && l.kind === "or");
      const andHtml = andLeaves.length
        ? `<div class="child and"><h4>all of these are stale</h4><ul>` +
          andLeaves.map((l) => leafHtml(l, readOnly)).join("") +
          `</ul></div>`
        : "";
      const orHtml = orLeaves.length
        ? `<div class="child or"><h4>at least one of these is stale (check left to right)</h4><ul>` +
          orLeaves.map((l) => leafHtml(l, readOnly)).join("") +
          `</ul></div>`
        : "";
      return `<div class="group" data-group="${index}"><h3>group ${index + 1}</h3>${andHtml}${orHtml}</div>`;
    })
    .join("");
  const status = readOnly ? `<p class="status">session ${esc(payload.state)} (read-only)</p>` : "";
  const blockers = view
    .blockers()
    .map((b) => `<li>${esc(b)}</li>`)
    .join("");
  const commit = readOnly
    ? ""
    : `<button id="commit" ${view.canCommit() ? "" : "disabled"}>commit decisions</button>` +
      (blockers ? `<ul class="blockers">${blockers}</ul>` : "");
  return (
    `<section class="tree" data-session="${esc(payload.session_id)}" data-state="${esc(payload.state)}">` +
    `<h2>new observation: <code>${esc(payload.new_observation.variable)} = ${esc(
      payload.new_observation.state,
    )}</code></h2>${status}${groups}${commit}</section>`
  );
}

export function renderConfirmation(payload: SessionPayload, revision: number): string {
  return (
    `<section class="confirmation">observation <code>${esc(payload.new_observation.variable)} = ` +
    `${esc(payload.new_observation.state)}</code> stored without conflict; record revision ${revision}</section>`
  );
}

export function renderObservationForm(model: ModelInfo): string {
  const options = model.variables
    .map((v) => `<option value="${esc(v.name)}">${esc(v.name)}</option>`)
    .join("");
  return (
    `<form id="observation-form">` +
    `<select id="variable" name="variable">${options}</select>` +
    `<select id="state" name="state"></select>` +
    `<button type="submit">submit observation</button>` +
    `</form>`
  );
}

export function statesFor(model: ModelInfo, variable: string): string[] {
  const spec = model.variables.find((v) => v.name === variable);
  return spec ? [...spec.states] : [];
}

export function renderError(code: string, message: string, staleRevision = false): string {
  const hint = staleRevision
    ? `<p class="hint">someone else updated this record; reload the session to continue</p>`
    : "";
  return `<section class="error" data-code="${esc(code)}"><b>${esc(code)}</b>: ${esc(message)}${hint}</section>`;
}
