/**
 * Contract: the rendered graph shows exactly the edge set the API served.
 * Fixtures are verbatim responses from a live engine.
 */

import { describe, expect, it } from "vitest";
import type { GraphPayload } from "../src/api";
import { buildGraphModel, renderGraphSvg, tierClass, versionLabel } from "../src/graphview";
import { loadFixture } from "./helpers";

const served = loadFixture<GraphPayload>("graph.json");
const afterEdit = loadFixture<GraphPayload>("graph_after_edit.json");

function servedEdgeSet(p: GraphPayload): Set<string> {
  return new Set(p.graph.edges.map((e) => `${e.source}->${e.target}`));
}

/** Read the drawn edge set back out of the SVG markup. */
function drawnEdgeSet(svg: string): Set<string> {
  const out = new Set<string>();
  for (const m of svg.matchAll(/data-source="([^"]+)" data-target="([^"]+)"/g)) {
    out.add(`${m[1]}->${m[2]}`);
  }
  return out;
}

describe("graph render matches the served edge set", () => {
  it("draws exactly the served edges, no more, no fewer", () => {
    const svg = renderGraphSvg(buildGraphModel(served));
    expect(drawnEdgeSet(svg)).toEqual(servedEdgeSet(served));
  });

  it("still matches after an accepted manual edit (v2 fixture)", () => {
    const svg = renderGraphSvg(buildGraphModel(afterEdit));
    expect(drawnEdgeSet(svg)).toEqual(servedEdgeSet(afterEdit));
    // the operator-added edge is drawn in the manual tier style
    expect(svg).toContain(`class="edge tier-manual"`);
  });

  it("draws every served node exactly once", () => {
    const svg = renderGraphSvg(buildGraphModel(served));
    for (const node of served.graph.nodes) {
      const hits = svg.match(new RegExp(`data-node="${node}"`, "g")) ?? [];
      expect(hits.length).toBe(1);
    }
  });

  it("a pending candidate edge is additive and rolls back cleanly", () => {
    const pending = { source: "x1", target: "x3" };
    expect(servedEdgeSet(served).has("x1->x3")).toBe(false);

    const withPending = drawnEdgeSet(renderGraphSvg(buildGraphModel(served, { pending })));
    const expected = new Set(servedEdgeSet(served));
    expected.add("x1->x3");
    expect(withPending).toEqual(expected);

    // rollback: re-render without the candidate restores the served set
    const rolledBack = drawnEdgeSet(renderGraphSvg(buildGraphModel(served, { pending: null })));
    expect(rolledBack).toEqual(servedEdgeSet(served));
  });

  it("edge styling encodes the served stability tier", () => {
    const model = buildGraphModel(served);
    for (const edge of model.edges) {
      const record = served.graph.edges.find((e) => e.source === edge.source && e.target === edge.target)!;
      expect(edge.tierClass).toBe(tierClass(record.tier));
    }
  });

  it("labels the served version and flags staleness when a newer one exists", () => {
    const current = buildGraphModel(served, { knownLatest: served.version });
    expect(current.stale).toBe(false);
    expect(versionLabel(current)).toContain(`v${served.version}`);

    const stale = buildGraphModel(served, { knownLatest: served.version + 1 });
    expect(stale.stale).toBe(true);
    expect(versionLabel(stale)).toContain("stale");
  });

  it("node tooltips carry the served annotations", () => {
    const model = buildGraphModel(served);
    for (const nodeVM of model.nodes) {
      const meta = served.annotations.nodes[nodeVM.name];
      if (meta && !meta.unannotated) {
        expect(nodeVM.tooltip).toContain(meta.description);
        expect(nodeVM.tooltip).toContain(meta.unit);
      }
    }
  });

  it("edge tooltips come from the served annotation text", () => {
    const model = buildGraphModel(served);
    for (const tip of served.annotations.edge_tooltips) {
      const edge = model.edges.find((e) => e.source === tip.source && e.target === tip.target)!;
      expect(edge.tooltip).toBe(tip.text);
    }
  });
});
