/**
 * Edit screen: structure edits on the causal graph.
 *
 * Operators add or remove nodes and edges; weights stay read-only (the
 * engine owns them). Edits are sequential: the form locks while one is in
 * flight. A candidate edge shows up dashed immediately and is rolled back
 * if the engine rejects it, with the engine's reason shown verbatim.
 */

import type { EditOutcome, EditRequestBody } from "./api.js";
import { escapeHtml } from "./format.js";
import type { GraphScreen, PendingEdge } from "./graphview.js";

export const EDIT_KINDS = ["add_edge", "remove_edge", "add_node", "remove_node"] as const;
export type EditKind = (typeof EDIT_KINDS)[number];

export interface EditFormState {
  kind: EditKind;
  node: string;
  source: string;
  target: string;
  weight: string;
  author: string;
}

export type BuiltEdit =
  | { ok: true; body: EditRequestBody }
  | { ok: false; error: string };

/** Validate form fields into a request body; no request leaves half-filled. */
export function buildEditBody(form: EditFormState, timestamp: number): BuiltEdit {
  const kind = form.kind;
  if (kind === "add_node" || kind === "remove_node") {
    if (!form.node.trim()) return { ok: false, error: "node name is required" };
    return {
      ok: true,
      body: { kind, node: form.node.trim(), author: form.author, timestamp },
    };
  }
  if (!form.source.trim() || !form.target.trim()) {
    return { ok: false, error: "source and target are required" };
  }
  const body: EditRequestBody = {
    kind,
    source: form.source.trim(),
    target: form.target.trim(),
    author: form.author,
    timestamp,
  };
  if (kind === "add_edge" && form.weight.trim()) {
    const w = Number(form.weight);
    if (Number.isNaN(w)) return { ok: false, error: "weight must be a number" };
    body.weight = w;
  }
  return { ok: true, body };
}

export interface Banner {
  cls: "ok" | "error";
  text: string;
}

/** Banner text for an edit outcome. Rejections quote the engine's reason
 * and message verbatim so the operator sees exactly why. */
export function editBanner(outcome: EditOutcome): Banner {
  if (outcome.status === 200) {
    return {
      cls: "ok",
      text: `accepted: ${outcome.body.message} (graph is now v${outcome.body.version})`,
    };
  }
  return {
    cls: "error",
    text: `rejected (${outcome.body.reason}): ${outcome.body.message}`,
  };
}

export function pendingEdgeFor(body: EditRequestBody): PendingEdge | null {
  if (body.kind === "add_edge" && body.source && body.target) {
    return { source: body.source, target: body.target };
  }
  return null;
}

// ---------------------------------------------------------------------------
// DOM wiring

export function mountEdit(
  submit: (edit: EditRequestBody) => Promise<EditOutcome>,
  graphScreen: GraphScreen,
): void {
  const kindSel = document.getElementById("edit-kind") as HTMLSelectElement;
  const nodeIn = document.getElementById("edit-node") as HTMLInputElement;
  const sourceIn = document.getElementById("edit-source") as HTMLInputElement;
  const targetIn = document.getElementById("edit-target") as HTMLInputElement;
  const weightIn = document.getElementById("edit-weight") as HTMLInputElement;
  const authorIn = document.getElementById("edit-author") as HTMLInputElement;
  const submitBtn = document.getElementById("edit-submit") as HTMLButtonElement;
  const banner = document.getElementById("edit-banner")!;
  const nodeRow = document.getElementById("edit-node-row")!;
  const edgeRows = document.getElementById("edit-edge-rows")!;

  function syncFields(): void {
    const nodeKind = kindSel.value === "add_node" || kindSel.value === "remove_node";
    nodeRow.style.display = nodeKind ? "" : "none";
    edgeRows.style.display = nodeKind ? "none" : "";
    weightIn.disabled = kindSel.value !== "add_edge";
  }
  kindSel.addEventListener("change", syncFields);
  syncFields();

  function showBanner(b: Banner): void {
    banner.innerHTML = `<span class="${b.cls}">${escapeHtml(b.text)}</span>`;
  }

  submitBtn.addEventListener("click", () => {
    const built = buildEditBody(
      {
        kind: kindSel.value as EditKind,
        node: nodeIn.value,
        source: sourceIn.value,
        target: targetIn.value,
        weight: weightIn.value,
        author: authorIn.value || "operator",
      },
      Date.now() / 1000,
    );
    if (!built.ok) {
      showBanner({ cls: "error", text: built.error });
      return;
    }
    submitBtn.disabled = true; // edits are sequential by design
    void (async () => {
      const pending = pendingEdgeFor(built.body);
      if (pending) graphScreen.showPending(pending); // optimistic dashed edge
      try {
        const outcome = await submit(built.body);
        showBanner(editBanner(outcome));
        if (outcome.status === 200) {
          graphScreen.markKnownVersion(outcome.body.version);
          await graphScreen.refresh(); // round-trip: render the accepted version
        } else if (pending) {
          graphScreen.showPending(null); // rejected: roll the candidate back
        }
      } catch (err) {
        if (pending) graphScreen.showPending(null);
        showBanner({ cls: "error", text: `request failed: ${(err as Error).message}` });
      } finally {
        submitBtn.disabled = false;
      }
    })();
  });
}
