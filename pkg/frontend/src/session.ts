// View-model for one update session: per-leaf decisions with the same
// commit-gating rules the server enforces, so anything the UI permits is
// accepted on a fresh revision.

import type {
  Decision,
  ModelInfo,
  RecommendationLeaf,
  SessionPayload,
} from "./types.js";

export type LeafKind = "and" | "or";

export interface LeafView {
  groupIndex: number;
  kind: LeafKind;
  /** position inside its child; OR order is the server's priority order */
  position: number;
  leaf: RecommendationLeaf;
  decision: Decision;
  answered: boolean;
}

const KEEP: Decision = { action: "keep" };

export class SessionView {
  private decisions = new Map<string, Decision>();

  constructor(
    public readonly payload: SessionPayload,
    private readonly model?: ModelInfo,
  ) {}

  get sessionId(): string {
    return this.payload.session_id;
  }

  get open(): boolean {
    return this.payload.state === "open";
  }

  get readOnly(): boolean {
    return !this.open;
  }

  /** Leaves in render order: groups as delivered, AND child before OR child,
   * OR leaves never reordered client-side. */
  leaves(): LeafView[] {
    const recommendation = this.payload.recommendation;
    if (!recommendation) return [];
    const out: LeafView[] = [];
    recommendation.groups.forEach((group, groupIndex) => {
      group.and_set.forEach((leaf, position) =>
        out.push(this.view(groupIndex, "and", position, leaf)),
      );
      group.or_set.forEach((leaf, position) =>
        out.push(this.view(groupIndex, "or", position, leaf)),
      );
    });
    return out;
  }

  private view(groupIndex: number, kind: LeafKind, position: number, leaf: RecommendationLeaf): LeafView {
    const decision = this.decisions.get(leaf.variable) ?? KEEP;
    return {
      groupIndex,
      kind,
      position,
      leaf,
      decision,
      answered: decision.action !== "keep",
    };
  }

  decisionFor(variable: string): Decision {
    return this.decisions.get(variable) ?? KEEP;
  }

  /** Set a decision; setting the same decision again reverts to keep, so a
   * double toggle restores the prior state. */
  toggleDecision(variable: string, decision: Decision): void {
    if (this.readOnly) {
      throw new Error(`session is ${this.payload.state}; decisions are read-only`);
    }
    this.assertLeaf(variable);
    if (decision.action === "replace") {
      this.assertValidState(variable, decision.state);
    }
    const current = this.decisions.get(variable) ?? KEEP;
    if (sameDecision(current, decision)) {
      this.decisions.delete(variable);
    } else if (decision.action === "keep") {
      this.decisions.delete(variable);
    } else {
      this.decisions.set(variable, decision);
    }
  }

  private assertLeaf(variable: string): void {
    const known = this.payload.recommendation?.groups.some(
      (g) =>
        g.and_set.some((l) => l.variable === variable) ||
        g.or_set.some((l) => l.variable === variable),
    );
    if (!known) throw new Error(`no tree leaf for variable ${variable}`);
  }

  private assertValidState(variable: string, state: string): void {
    if (!this.model) return;
    const spec = this.model.variables.find((v) => v.name === variable);
    if (spec && !spec.states.includes(state)) {
      throw new Error(`variable ${variable} has no state ${state}`);
    }
  }

  /** Reasons the commit button stays disabled; empty means commit is allowed.
   * Mirrors the server's invariants exactly. */
  blockers(): string[] {
    if (!this.open) return [`session is ${this.payload.state}`];
    const recommendation = this.payload.recommendation;
    if (!recommendation) return ["session carries no recommendation"];
    const out: string[] = [];
    recommendation.groups.forEach((group, index) => {
      for (const leaf of group.and_set) {
        if (this.decisionFor(leaf.variable).action === "keep") {
          out.push(`mandatory leaf ${leaf.variable} (group ${index + 1}) unresolved`);
        }
      }
      if (group.or_set.length > 0) {
        const touched = group.or_set.some(
          (leaf) => this.decisionFor(leaf.variable).action !== "keep",
        );
        if (!touched) {
          out.push(`group ${index + 1}: resolve at least one of its alternatives`);
        }
      }
    });
    return out;
  }

  canCommit(): boolean {
    return this.blockers().length === 0;
  }

  /** Decisions payload for the commit endpoint (keep entries omitted). */
  decisionsPayload(): Record<string, Decision> {
    const out: Record<string, Decision> = {};
    for (const [variable, decision] of this.decisions.entries()) {
      if (decision.action !== "keep") out[variable] = decision;
    }
    return out;
  }
}

function sameDecision(a: Decision, b: Decision): boolean {
  if (a.action !== b.action) return false;
  if (a.action === "replace" && b.action === "replace") return a.state === b.state;
  return true;
}
