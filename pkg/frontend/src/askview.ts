/**
 * Ask screen: free-text questions answered by the engine's templates.
 *
 * The answer text is shown verbatim; the structured values ride along in
 * a details block so every number in the prose can be traced back to a
 * machine-readable field.
 */

import type { AnswerPayload } from "./api.js";
import { escapeHtml } from "./format.js";

export interface AnswerView {
  verdict: string;
  verdictClass: string;
  category: string;
  text: string;
  valueLines: string[];
}

function flatten(prefix: string, value: unknown, out: string[]): void {
  if (value === null || value === undefined) {
    out.push(`${prefix}: none`);
  } else if (Array.isArray(value)) {
    out.push(`${prefix}: [${value.map((v) => String(v)).join(", ")}]`);
  } else if (typeof value === "object") {
    for (const [k, v] of Object.entries(value as Record<string, unknown>)) {
      flatten(prefix ? `${prefix}.${k}` : k, v, out);
    }
  } else {
    out.push(`${prefix}: ${String(value)}`);
  }
}

export function buildAnswerView(payload: AnswerPayload): AnswerView {
  const valueLines: string[] = [];
  flatten("", payload.values, valueLines);
  return {
    verdict: payload.verdict,
    verdictClass: `verdict-${payload.verdict.replace(/\s+/g, "-")}`,
    category: payload.category ?? "unrecognized",
    text: payload.text,
    valueLines,
  };
}

export function renderAnswer(view: AnswerView): string {
  const values =
    view.valueLines.length > 0
      ? `<details><summary>underlying values</summary><pre>${escapeHtml(view.valueLines.join("\n"))}</pre></details>`
      : "";
  return `
  <div class="answer">
    <span class="badge ${view.verdictClass}">${escapeHtml(view.verdict)}</span>
    <span class="category">${escapeHtml(view.category)}</span>
    <p>${escapeHtml(view.text)}</p>
    ${values}
  </div>`;
}

// ---------------------------------------------------------------------------
// DOM wiring

export function mountAsk(ask: (question: string) => Promise<AnswerPayload>): void {
  const input = document.getElementById("ask-question") as HTMLInputElement;
  const btn = document.getElementById("ask-submit") as HTMLButtonElement;
  const host = document.getElementById("ask-answers")!;

  function submit(): void {
    const question = input.value.trim();
    if (!question) return;
    void (async () => {
      try {
        const payload = await ask(question);
        const block = `<div class="qa-pair"><p class="question">${escapeHtml(payload.question)}</p>${renderAnswer(
          buildAnswerView(payload),
        )}</div>`;
        host.insertAdjacentHTML("afterbegin", block);
      } catch (err) {
        host.insertAdjacentHTML(
          "afterbegin",
          `<div class="qa-pair error">question failed: ${escapeHtml((err as Error).message)}</div>`,
        );
      }
    })();
  }

  btn.addEventListener("click", submit);
  input.addEventListener("keydown", (e) => {
    if (e.key === "Enter") submit();
  });
}
