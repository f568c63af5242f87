/**
 * Stream screen: live replay of a dataset over server-sent events.
 *
 * Each pushed row already carries the engine's deviation report, so the
 * cells are colored straight from the served direction (inside / above /
 * below) — the UI never does band arithmetic of its own.
 */

import type { DeviationEntry, RowEvent } from "./api.js";
import { escapeHtml, fullPrecision, sig4 } from "./format.js";

export interface ParsedFrame {
  kind: string;
  data: Record<string, unknown>;
}

/** Parse one raw SSE frame ("event: X\ndata: {...}\n\n") into kind + payload. */
export function parseSseFrame(frame: string): ParsedFrame | null {
  let kind = "message";
  let data = "";
  for (const line of frame.split("\n")) {
    if (line.startsWith("event:")) kind = line.slice(6).trim();
    else if (line.startsWith("data:")) data += line.slice(5).trim();
  }
  if (!data) return null;
  try {
    return { kind, data: JSON.parse(data) as Record<string, unknown> };
  } catch {
    return null;
  }
}

/** CSS class for a cell, from the served band direction. */
export function cellClass(entry: DeviationEntry | undefined): string {
  if (!entry) return "nodata";
  switch (entry.direction) {
    case "inside":
      return "ok";
    case "above":
      return "high";
    case "below":
      return "low";
    default:
      return "nodata";
  }
}

export interface StreamCell {
  column: string;
  text: string;
  cls: string;
  title: string;
}

/** One cell per column; color and hover text come from the event itself. */
export function buildStreamCells(event: RowEvent, columns: string[]): StreamCell[] {
  return columns.map((column) => {
    const value = event.values[column];
    const entry = event.deviations?.entries[column];
    const band = entry ? `band [${sig4(entry.lower)}, ${sig4(entry.upper)}], dev ${sig4(entry.dev)}` : "no band";
    return {
      column,
      text: sig4(value ?? null),
      cls: cellClass(entry),
      title: `${fullPrecision(value ?? null)} — ${band}`,
    };
  });
}

export function renderStreamRow(event: RowEvent, columns: string[]): string {
  const cells = buildStreamCells(event, columns)
    .map((c) => `<td class="num ${c.cls}" title="${escapeHtml(c.title)}">${c.text}</td>`)
    .join("");
  const state = event.cycle_state ?? "";
  const label = event.anomaly_label === undefined ? "" : String(event.anomaly_label);
  return `<tr><td>${event.index}</td><td>${escapeHtml(state)}</td>${cells}<td>${escapeHtml(label)}</td></tr>`;
}

export function streamHeader(columns: string[]): string {
  const cols = columns.map((c) => `<th>${escapeHtml(c)}</th>`).join("");
  return `<tr><th>#</th><th>state</th>${cols}<th>label</th></tr>`;
}

// ---------------------------------------------------------------------------
// DOM wiring

export interface StreamApi {
  replayStart(
    datasetId: string,
    rate?: number,
    limit?: number,
  ): Promise<{ session_id: string; rows: number; rate: number }>;
  replayStop(): Promise<{ status: string }>;
  streamUrl(): string;
}

export interface StreamScreen {
  /** Latest pushed row, for cross-screen use (root-cause frame). */
  lastRow(): { values: Record<string, number>; cycle_state: string | null } | null;
}

const MAX_ROWS_SHOWN = 40;

export function mountStream(api: StreamApi): StreamScreen {
  const dsIn = document.getElementById("stream-dataset") as HTMLInputElement;
  const rateIn = document.getElementById("stream-rate") as HTMLInputElement;
  const limitIn = document.getElementById("stream-limit") as HTMLInputElement;
  const startBtn = document.getElementById("stream-start") as HTMLButtonElement;
  const stopBtn = document.getElementById("stream-stop") as HTMLButtonElement;
  const status = document.getElementById("stream-status")!;
  const table = document.getElementById("stream-table") as HTMLTableElement;

  let source: EventSource | null = null;
  let columns: string[] = [];
  let latest: RowEvent | null = null;

  function closeSource(): void {
    if (source) {
      source.close();
      source = null;
    }
  }

  function handleRow(event: RowEvent): void {
    latest = event;
    if (columns.length === 0) {
      columns = Object.keys(event.values).sort();
      table.tHead!.innerHTML = streamHeader(columns);
    }
    const body = table.tBodies[0];
    body.insertAdjacentHTML("afterbegin", renderStreamRow(event, columns));
    while (body.rows.length > MAX_ROWS_SHOWN) body.deleteRow(body.rows.length - 1);
  }

  function listen(): void {
    closeSource();
    source = new EventSource(api.streamUrl());
    source.addEventListener("handshake", (e) => {
      const data = JSON.parse((e as MessageEvent).data) as { rows: number; rate: number };
      status.textContent = `replaying ${data.rows} rows at ${data.rate} rows/s`;
    });
    source.addEventListener("row", (e) => {
      handleRow(JSON.parse((e as MessageEvent).data) as RowEvent);
    });
    source.addEventListener("end", (e) => {
      const data = JSON.parse((e as MessageEvent).data) as { reason: string; rows_sent: number };
      status.textContent = `replay ended (${data.reason}) after ${data.rows_sent} rows`;
      closeSource();
    });
    source.onerror = () => {
      status.textContent = "stream connection lost";
    };
  }

  startBtn.addEventListener("click", () => {
    const datasetId = dsIn.value.trim();
    if (!datasetId) {
      status.textContent = "enter a dataset id";
      return;
    }
    const rate = Number(rateIn.value) || undefined;
    const limit = Number(limitIn.value) || undefined;
    void (async () => {
      try {
        columns = [];
        table.tBodies[0].innerHTML = "";
        const started = await api.replayStart(datasetId, rate, limit);
        status.textContent = `session ${started.session_id}: ${started.rows} rows queued`;
        listen();
      } catch (err) {
        status.textContent = `start failed: ${(err as Error).message}`;
      }
    })();
  });

  stopBtn.addEventListener("click", () => {
    void (async () => {
      try {
        await api.replayStop();
        status.textContent = "replay stopped";
      } catch (err) {
        status.textContent = `stop failed: ${(err as Error).message}`;
      } finally {
        closeSource();
      }
    })();
  });

  return {
    lastRow: () => (latest ? { values: latest.values, cycle_state: latest.cycle_state ?? null } : null),
  };
}
