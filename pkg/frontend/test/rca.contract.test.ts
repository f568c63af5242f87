/**
 * Contract: every number in the root-cause table is a served candidate
 * field (score, band deviation, path strength) — ranked by the engine,
 * rendered untouched. Fixture is a verbatim engine response.
 */

import { describe, expect, it } from "vitest";
import type { RcaPayload } from "../src/api";
import { sig4 } from "../src/format";
import { buildRcaRows, deviationSummary, renderRcaTable } from "../src/rcaview";
import { loadFixture } from "./helpers";

const payload = loadFixture<RcaPayload>("rca.json");

describe("root-cause table is traceable to served candidate fields", () => {
  const rows = buildRcaRows(payload.report.candidates);

  it("keeps the engine's ranking order and values untouched", () => {
    expect(rows.length).toBe(payload.report.candidates.length);
    rows.forEach((row, i) => {
      const c = payload.report.candidates[i];
      expect(row.rank).toBe(i + 1);
      expect(row.variable).toBe(c.variable);
      expect(row.score).toBe(c.score);
      expect(row.dev).toBe(c.dev);
      expect(row.pathStrength).toBe(c.path_strength);
      expect(row.explanation).toBe(c.explanation);
    });
  });

  it("renders each served figure at 4 significant digits", () => {
    const html = renderRcaTable(rows);
    for (const c of payload.report.candidates) {
      expect(html).toContain(`data-variable="${c.variable}"`);
      expect(html).toContain(`>${sig4(c.score)}</td>`);
      expect(html).toContain(`>${sig4(c.dev)}</td>`);
      expect(html).toContain(`>${sig4(c.path_strength)}</td>`);
    }
  });

  it("full precision rides in the hover titles", () => {
    const html = renderRcaTable(rows);
    const top = payload.report.candidates[0];
    expect(html).toContain(`title="${String(top.score)}"`);
    expect(html).toContain(`title="${String(top.path_strength)}"`);
  });

  it("the deviation summary names the out-of-band variables and direction", () => {
    const text = deviationSummary(payload.deviations);
    for (const [name, entry] of Object.entries(payload.deviations.entries)) {
      if (entry.direction !== "inside") {
        expect(text).toContain(`${name} ${entry.direction}`);
      } else {
        expect(text).not.toContain(`${name} inside`);
      }
    }
  });

  it("an empty candidate list renders a clear note, not an empty table", () => {
    expect(renderRcaTable([])).toContain("no candidates");
  });
});
