/**
 * Root-cause screen: rank upstream candidates for an anomalous target.
 *
 * The operator names the anomalous node and picks K; the measurement
 * frame comes either from the latest streamed row or from pasted JSON.
 * Every column is a served field: score, band deviation, and |tau|
 * (path_strength) arrive ranked from the engine — nothing is recomputed
 * here.
 */

import type { DeviationReport, RcaCandidate, RcaPayload } from "./api.js";
import { escapeHtml, numCell } from "./format.js";

export interface RcaRow {
  rank: number;
  variable: string;
  score: number;
  dev: number;
  pathStrength: number;
  explanation: string;
}

export function buildRcaRows(candidates: RcaCandidate[]): RcaRow[] {
  return candidates.map((c, i) => ({
    rank: i + 1,
    variable: c.variable,
    score: c.score,
    dev: c.dev,
    pathStrength: c.path_strength,
    explanation: c.explanation,
  }));
}

export function renderRcaTable(rows: RcaRow[]): string {
  if (rows.length === 0) return `<p class="note">no candidates outside their bands</p>`;
  const body = rows
    .map(
      (row) => `
    <tr data-variable="${escapeHtml(row.variable)}">
      <td>${row.rank}</td>
      <td>${escapeHtml(row.variable)}</td>
      ${numCell(row.score)}
      ${numCell(row.dev)}
      ${numCell(row.pathStrength)}
      <td class="explanation">${escapeHtml(row.explanation)}</td>
    </tr>`,
    )
    .join("");
  return `
  <table>
    <thead><tr>
      <th>#</th><th>variable</th><th>score</th><th>band deviation</th>
      <th>|tau| to target</th><th>explanation</th>
    </tr></thead>
    <tbody>${body}</tbody>
  </table>`;
}

/** Compact summary of which variables sit outside their bands. */
export function deviationSummary(report: DeviationReport): string {
  const out = Object.entries(report.entries)
    .filter(([, e]) => e.direction !== "inside")
    .map(([name, e]) => `${name} ${e.direction}`);
  const state = report.cycle_state ? ` (state: ${report.cycle_state})` : "";
  if (out.length === 0) return `all variables inside their bands${state}`;
  return `outside bands: ${out.join(", ")}${state}`;
}

// ---------------------------------------------------------------------------
// DOM wiring

export interface RcaApi {
  runRca(req: {
    target: string;
    k: number;
    frame?: Record<string, number>;
    dataset_id?: string;
    row_index?: number;
    cycle_state?: string;
  }): Promise<RcaPayload>;
}

export function mountRca(
  api: RcaApi,
  nodeNames: () => string[],
  latestStreamRow: () => { values: Record<string, number>; cycle_state: string | null } | null,
): void {
  const targetSel = document.getElementById("rca-target") as HTMLSelectElement;
  const kIn = document.getElementById("rca-k") as HTMLInputElement;
  const frameIn = document.getElementById("rca-frame") as HTMLTextAreaElement;
  const useStreamBtn = document.getElementById("rca-use-stream") as HTMLButtonElement;
  const runBtn = document.getElementById("rca-run") as HTMLButtonElement;
  const summary = document.getElementById("rca-summary")!;
  const tableHost = document.getElementById("rca-table")!;

  let cycleState: string | null = null;

  function fillTargets(): void {
    const names = nodeNames();
    targetSel.innerHTML = names.map((n) => `<option>${escapeHtml(n)}</option>`).join("");
  }
  targetSel.addEventListener("focus", fillTargets);
  fillTargets();

  useStreamBtn.addEventListener("click", () => {
    const row = latestStreamRow();
    if (!row) {
      summary.textContent = "no streamed row yet — start a replay first";
      return;
    }
    frameIn.value = JSON.stringify(row.values);
    cycleState = row.cycle_state;
    summary.textContent = `frame taken from the live stream${cycleState ? ` (state ${cycleState})` : ""}`;
  });

  runBtn.addEventListener("click", () => {
    const target = targetSel.value;
    const k = Number(kIn.value) || 3;
    let frame: Record<string, number>;
    try {
      frame = JSON.parse(frameIn.value) as Record<string, number>;
    } catch {
      summary.textContent = "frame must be a JSON object of {variable: value}";
      return;
    }
    void (async () => {
      try {
        const payload = await api.runRca({
          target,
          k,
          frame,
          ...(cycleState ? { cycle_state: cycleState } : {}),
        });
        summary.textContent = `${payload.report.method} ranking for ${payload.report.target} — ${deviationSummary(payload.deviations)}`;
        tableHost.innerHTML = renderRcaTable(buildRcaRows(payload.report.candidates));
      } catch (err) {
        summary.textContent = `ranking failed: ${(err as Error).message}`;
      }
    })();
  });
}
