import { describe, expect, it } from "vitest";

import { renderObservationForm, renderRecommendationTree, statesFor } from "../src/render.js";
import { SessionView } from "../src/session.js";
import { miniModel, workedSession } from "./fixtures.js";

describe("tree rendering", () => {
  it("marks AND leaves mandatory and shows OR posteriors with proposals", () => {
    const html = renderRecommendationTree(new SessionView(workedSession()));
    expect(html).toContain("must update");
    expect(html).toContain("p_x=0.3370");
    expect(html).toContain("replace with <b>never</b>");
    expect(html.match(/class="group"/g)).toHaveLength(4);
  });

  it("renders OR leaves in server order, left to right", () => {
    const html = renderRecommendationTree(new SessionView(workedSession()));
    const order = ["muscleImpairment", "strokeTIA", "dementia", "parkinson"].map((v) =>
      html.indexOf(`data-variable="${v}"`),
    );
    expect(order.every((i) => i >= 0)).toBe(true);
    expect([...order].sort((a, b) => a - b)).toEqual(order);
  });

  it("disables commit until the gating rules pass", () => {
    const view = new SessionView(workedSession());
    expect(renderRecommendationTree(view)).toContain("<button id=\"commit\" disabled>");
    for (const name of ["doShopping", "driveCar", "getUpAlone", "livesAlone"]) {
      view.toggleDecision(name, { action: "delete" });
    }
    view.toggleDecision("muscleImpairment", { action: "delete" });
    expect(renderRecommendationTree(view)).toContain("<button id=\"commit\" >");
  });

  it("renders committed sessions read-only", () => {
    const html = renderRecommendationTree(new SessionView(workedSession("committed")));
    expect(html).toContain("read-only");
    expect(html).not.toContain("<button id=\"commit\"");
    expect(html).not.toContain("input type=\"radio\"");
  });

  it("observation form lists model variables and their states", () => {
    const html = renderObservationForm(miniModel);
    expect(html).toContain('value="muscleImpairment"');
    expect(statesFor(miniModel, "livesAlone")).toEqual(["no", "yes"]);
    expect(statesFor(miniModel, "ghost")).toEqual([]);
  });
});
