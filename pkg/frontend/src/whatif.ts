/**
 * What-If screen: predicted downstream shifts for an intervention.
 *
 * The operator picks a source and two levels (a1/a2, prefilled with the
 * engine's quartile defaults). The table shows the engine's predicted
 * shift per downstream node and, on request, the observed contrast and
 * verdict from the counterfactual check. All numbers come straight from
 * API fields; this module only formats and joins them.
 */

import type { CounterfactualsPayload, WhatIfPayload } from "./api.js";
import { escapeHtml, numCell, sig4 } from "./format.js";

export interface WhatIfRow {
  node: string;
  tau: number;
  shift: number;
  observed: number | null;
  error: number | null;
  verdict: string | null;
  interpretation: string | null;
}

/** One row per downstream node (nonzero total effect), strongest first. */
export function buildWhatIfRows(payload: WhatIfPayload): WhatIfRow[] {
  return Object.keys(payload.shifts)
    .filter((node) => payload.tau[node] !== 0)
    .sort((a, b) => Math.abs(payload.shifts[b]) - Math.abs(payload.shifts[a]) || a.localeCompare(b))
    .map((node) => ({
      node,
      tau: payload.tau[node],
      shift: payload.shifts[node],
      observed: null,
      error: null,
      verdict: null,
      interpretation: null,
    }));
}

/** Quartile defaults for the form, read off a null-level counterfactual
 * result (the engine fills a1/a2 with the source's quartiles). */
export function quartileLevels(payload: CounterfactualsPayload): { a1: number; a2: number } | null {
  for (const r of payload.results) {
    if (r.a1 !== null && r.a2 !== null) return { a1: r.a1, a2: r.a2 };
  }
  return null;
}

/** Join observed contrasts onto the prediction rows by target node. */
export function mergeObserved(rows: WhatIfRow[], payload: CounterfactualsPayload): WhatIfRow[] {
  const byTarget = new Map(payload.results.map((r) => [r.target, r]));
  return rows.map((row) => {
    const r = byTarget.get(row.node);
    if (!r) return row;
    return {
      ...row,
      observed: r.delta_obs,
      error: r.error,
      verdict: r.verdict,
      interpretation: r.interpretation,
    };
  });
}

export function renderWhatIfTable(rows: WhatIfRow[]): string {
  if (rows.length === 0) return `<p class="note">no downstream nodes for this source</p>`;
  const body = rows
    .map(
      (row) => `
    <tr data-node="${escapeHtml(row.node)}">
      <td>${escapeHtml(row.node)}</td>
      ${numCell(row.tau)}
      ${numCell(row.shift, "num shift")}
      ${numCell(row.observed)}
      ${numCell(row.error)}
      <td class="verdict ${row.verdict ? escapeHtml(row.verdict.replace(/\s+/g, "-")) : ""}"
          title="${escapeHtml(row.interpretation ?? "")}">${escapeHtml(row.verdict ?? "")}</td>
    </tr>`,
    )
    .join("");
  return `
  <table>
    <thead><tr>
      <th>node</th><th>tau</th><th>predicted shift</th>
      <th>observed</th><th>error</th><th>verdict</th>
    </tr></thead>
    <tbody>${body}</tbody>
  </table>`;
}

export function levelSummary(payload: WhatIfPayload): string {
  return `setting ${payload.source} from ${sig4(payload.a1)} to ${sig4(payload.a2)} (graph v${payload.version})`;
}

// ---------------------------------------------------------------------------
// DOM wiring

export interface WhatIfApi {
  whatIf(source: string, a1: number, a2: number): Promise<WhatIfPayload>;
  counterfactuals(
    specs: { source: string; target: string; a1?: number; a2?: number }[],
  ): Promise<CounterfactualsPayload>;
}

export function mountWhatIf(api: WhatIfApi, nodeNames: () => string[]): void {
  const sourceSel = document.getElementById("whatif-source") as HTMLSelectElement;
  const a1In = document.getElementById("whatif-a1") as HTMLInputElement;
  const a2In = document.getElementById("whatif-a2") as HTMLInputElement;
  const predictBtn = document.getElementById("whatif-predict") as HTMLButtonElement;
  const validateBtn = document.getElementById("whatif-validate") as HTMLButtonElement;
  const summary = document.getElementById("whatif-summary")!;
  const tableHost = document.getElementById("whatif-table")!;

  let rows: WhatIfRow[] = [];
  let lastPayload: WhatIfPayload | null = null;

  function fillSources(): void {
    const names = nodeNames();
    sourceSel.innerHTML = names.map((n) => `<option>${escapeHtml(n)}</option>`).join("");
  }

  // prefill a1/a2 with the engine's quartile defaults for the source
  async function prefill(): Promise<void> {
    const source = sourceSel.value;
    const other = nodeNames().find((n) => n !== source);
    if (!source || !other) return;
    try {
      const levels = quartileLevels(await api.counterfactuals([{ source, target: other }]));
      if (levels) {
        a1In.value = String(levels.a1);
        a2In.value = String(levels.a2);
      }
    } catch {
      // leave the fields as they are; prediction will complain if empty
    }
  }

  sourceSel.addEventListener("change", () => void prefill());
  sourceSel.addEventListener("focus", fillSources);
  fillSources();
  if (sourceSel.value) void prefill();

  predictBtn.addEventListener("click", () => {
    const a1 = Number(a1In.value);
    const a2 = Number(a2In.value);
    if (!sourceSel.value || Number.isNaN(a1) || Number.isNaN(a2)) {
      summary.textContent = "pick a source and two numeric levels";
      return;
    }
    void (async () => {
      try {
        lastPayload = await api.whatIf(sourceSel.value, a1, a2);
        rows = buildWhatIfRows(lastPayload);
        summary.textContent = levelSummary(lastPayload);
        tableHost.innerHTML = renderWhatIfTable(rows);
        validateBtn.disabled = rows.length === 0;
      } catch (err) {
        summary.textContent = `prediction failed: ${(err as Error).message}`;
      }
    })();
  });

  validateBtn.addEventListener("click", () => {
    if (!lastPayload || rows.length === 0) return;
    const p = lastPayload;
    void (async () => {
      try {
        const cf = await api.counterfactuals(
          rows.map((row) => ({ source: p.source, target: row.node, a1: p.a1, a2: p.a2 })),
        );
        rows = mergeObserved(rows, cf);
        tableHost.innerHTML = renderWhatIfTable(rows);
      } catch (err) {
        summary.textContent = `validation failed: ${(err as Error).message}`;
      }
    })();
  });
}
