/**
 * Entry point: wires the screens to the engine's HTTP API.
 *
 * The API base defaults to same-origin and can be pointed elsewhere with
 * ?api=http://host:port when the static files are served separately.
 */

import * as api from "./api.js";
import { mountAsk } from "./askview.js";
import { mountEdit } from "./editview.js";
import { mountGraph } from "./graphview.js";
import { mountRca } from "./rcaview.js";
import { mountStream } from "./streamview.js";
import { mountWhatIf } from "./whatif.js";

function setupTabs(): void {
  const buttons = Array.from(document.querySelectorAll<HTMLButtonElement>("nav button[data-panel]"));
  const panels = Array.from(document.querySelectorAll<HTMLElement>(".panel"));
  for (const btn of buttons) {
    btn.addEventListener("click", () => {
      for (const b of buttons) b.classList.toggle("active", b === btn);
      for (const p of panels) p.classList.toggle("active", p.id === `panel-${btn.dataset.panel}`);
    });
  }
}

function setupConnectivityBanner(): (online: boolean) => void {
  const banner = document.getElementById("offline-banner")!;
  return (online: boolean) => {
    banner.style.display = online ? "none" : "";
  };
}

function setupDataControls(onDataset: (datasetId: string) => void, refreshGraph: () => Promise<void>): void {
  const fileIn = document.getElementById("data-file") as HTMLInputElement;
  const discoverBtn = document.getElementById("data-discover") as HTMLButtonElement;
  const status = document.getElementById("data-status")!;
  let datasetId: string | null = null;

  fileIn.addEventListener("change", () => {
    const file = fileIn.files?.[0];
    if (!file) return;
    void (async () => {
      try {
        const ds = await api.uploadCsv(await file.text());
        datasetId = ds.dataset_id;
        onDataset(ds.dataset_id);
        status.textContent = `uploaded ${ds.dataset_id}: ${ds.rows} rows, ${ds.variables.length} variables` +
          (ds.dropped_rows > 0 ? ` (${ds.dropped_rows} rows dropped)` : "");
        discoverBtn.disabled = false;
      } catch (err) {
        status.textContent = `upload failed: ${(err as Error).message}`;
      }
    })();
  });

  discoverBtn.addEventListener("click", () => {
    if (!datasetId) return;
    const id = datasetId;
    discoverBtn.disabled = true;
    status.textContent = "running discovery…";
    void (async () => {
      try {
        const job = await api.discover(id, {});
        if (job.status === "done") {
          status.textContent = `discovery done — graph v${job.graph_version}`;
          await refreshGraph();
        } else {
          status.textContent = `discovery ${job.status}: ${job.error ?? "no detail"}`;
        }
      } catch (err) {
        status.textContent = `discovery failed: ${(err as Error).message}`;
      } finally {
        discoverBtn.disabled = false;
      }
    })();
  });
}

function start(): void {
  api.configure(api.apiBase(), setupConnectivityBanner());
  setupTabs();

  const graphScreen = mountGraph(api.getGraph);
  mountEdit(api.submitEdit, graphScreen);
  mountWhatIf({ whatIf: api.whatIf, counterfactuals: api.counterfactuals }, () => graphScreen.nodeNames());
  const streamScreen = mountStream({
    replayStart: api.replayStart,
    replayStop: api.replayStop,
    streamUrl: api.streamUrl,
  });
  mountRca({ runRca: api.runRca }, () => graphScreen.nodeNames(), () => streamScreen.lastRow());
  mountAsk(api.ask);

  setupDataControls(
    (datasetId) => {
      (document.getElementById("stream-dataset") as HTMLInputElement).value = datasetId;
    },
    () => graphScreen.refresh(),
  );

  void graphScreen.refresh().catch(() => {
    document.getElementById("graph-version")!.textContent = "engine unreachable";
  });
}

document.addEventListener("DOMContentLoaded", start);
