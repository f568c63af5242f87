/**
 * Typed client for the engine's HTTP API.
 *
 * Every screen goes through this module; nothing else in the UI talks to
 * the network. The base URL defaults to same-origin and can be overridden
 * with ?api=http://host:port in the page URL.
 */

export interface EdgeRecord {
  source: string;
  target: string;
  weight: number;
  std: number | null;
  stability: number | null;
  frequency: number | null;
  tier: string | null;
}

export interface GraphDict {
  nodes: string[];
  edges: EdgeRecord[];
  provenance: Record<string, unknown>;
}

export interface NodeMeta {
  type?: string;
  description?: string;
  unit?: string;
  anomaly_relevance?: string;
  unannotated: boolean;
}

export interface EdgeTooltip {
  source: string;
  target: string;
  text: string;
}

export interface GraphPayload {
  version: number;
  dataset_id: string | null;
  graph: GraphDict;
  annotations: {
    nodes: Record<string, NodeMeta>;
    edge_tooltips: EdgeTooltip[];
  };
}

export interface WhatIfPayload {
  version: number;
  source: string;
  a1: number;
  a2: number;
  shifts: Record<string, number>;
  tau: Record<string, number>;
}

export interface CounterfactualResult {
  source: string;
  target: string;
  tau: number;
  a1: number | null;
  a2: number | null;
  delta_pred: number | null;
  delta_obs: number | null;
  error: number | null;
  n_baseline: number;
  n_counterfactual: number;
  verdict: string;
  interpretation: string;
}

export interface CounterfactualsPayload {
  version: number;
  results: CounterfactualResult[];
}

export interface RcaCandidate {
  variable: string;
  score: number;
  dev: number;
  path_strength: number;
  explanation: string;
}

export interface DeviationEntry {
  value: number;
  lower: number;
  upper: number;
  dev: number;
  direction: string;
}

export interface DeviationReport {
  cycle_state: string | null;
  entries: Record<string, DeviationEntry>;
}

export interface RcaPayload {
  report: {
    target: string;
    k: number;
    method: string;
    candidates: RcaCandidate[];
    all_ranked: RcaCandidate[];
  };
  deviations: DeviationReport;
}

export interface AnswerPayload {
  question: string;
  template_id: string | null;
  category: string | null;
  verdict: string;
  text: string;
  values: unknown;
}

export interface DatasetPayload {
  dataset_id: string;
  variables: string[];
  rows: number;
  dropped_rows: number;
  has_cycle_state: boolean;
  has_anomaly_label: boolean;
  has_timestamps: boolean;
}

export interface ReplayStartPayload {
  session_id: string;
  dataset_id: string;
  rows: number;
  rate: number;
  status: string;
}

export interface RowEvent {
  event: "row";
  session_id: string;
  index: number;
  timestamp: number;
  values: Record<string, number>;
  cycle_state?: string;
  anomaly_label?: string | number;
  deviations?: DeviationReport;
}

export interface ApiErrorBody {
  reason: string;
  message: string;
}

export interface EditRequestBody {
  kind: string;
  node?: string;
  source?: string;
  target?: string;
  weight?: number;
  author: string;
  timestamp: number;
}

export interface EditAcceptedBody {
  accepted: true;
  message: string;
  version: number;
  graph: GraphDict;
}

/** A 409 is an expected outcome of an edit, not a transport failure. */
export type EditOutcome =
  | { status: 200; body: EditAcceptedBody }
  | { status: 409; body: ApiErrorBody };

export class ApiError extends Error {
  status: number;
  reason: string;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.status = status;
    this.reason = body.reason;
  }
}

export function apiBase(): string {
  const override = new URLSearchParams(window.location.search).get("api");
  return (override ?? "").replace(/\/$/, "");
}

let base = "";
let connectivityListener: ((online: boolean) => void) | null = null;

export function configure(baseUrl: string, onConnectivity?: (online: boolean) => void): void {
  base = baseUrl.replace(/\/$/, "");
  connectivityListener = onConnectivity ?? null;
}

export function streamUrl(): string {
  return `${base}/stream`;
}

async function call<T>(method: string, path: string, body?: unknown): Promise<T> {
  let response: Response;
  try {
    response = await fetch(base + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  } catch (err) {
    connectivityListener?.(false);
    throw err;
  }
  connectivityListener?.(true);
  if (!response.ok) {
    throw new ApiError(response.status, (await response.json()) as ApiErrorBody);
  }
  return (await response.json()) as T;
}

export const getGraph = () => call<GraphPayload>("GET", "/graph");

export const uploadCsv = async (csv: string): Promise<DatasetPayload> => {
  const response = await fetch(`${base}/datasets`, {
    method: "POST",
    headers: { "Content-Type": "text/csv" },
    body: csv,
  });
  if (!response.ok) throw new ApiError(response.status, await response.json());
  return response.json();
};

export const discover = (datasetId: string, config: Record<string, unknown>) =>
  call<{ job_id: string; status: string; error: string | null; graph_version: number | null }>(
    "POST", "/discover", { dataset_id: datasetId, config });

export const whatIf = (source: string, a1: number, a2: number) =>
  call<WhatIfPayload>("POST", "/whatif", { source, a1, a2 });

export const counterfactuals = (
  specs: { source: string; target: string; a1?: number; a2?: number }[],
) => call<CounterfactualsPayload>("POST", "/counterfactuals", { specs });

export const runRca = (req: {
  target: string;
  k: number;
  frame?: Record<string, number>;
  dataset_id?: string;
  row_index?: number;
  cycle_state?: string;
}) => call<RcaPayload>("POST", "/rca", req);

export const ask = (question: string) => call<AnswerPayload>("POST", "/qa", { question });

export const replayStart = (datasetId: string, rate?: number, limit?: number) =>
  call<ReplayStartPayload>("POST", "/replay/start", {
    dataset_id: datasetId,
    ...(rate !== undefined ? { rate } : {}),
    ...(limit !== undefined ? { limit } : {}),
  });

export const replayStop = () =>
  call<{ session_id: string; status: string; events_buffered: number }>("POST", "/replay/stop", {});

/** Submit a graph edit; resolves for both accepted (200) and rejected (409). */
export async function submitEdit(edit: EditRequestBody): Promise<EditOutcome> {
  let response: Response;
  try {
    response = await fetch(`${base}/graph/edits`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(edit),
    });
  } catch (err) {
    connectivityListener?.(false);
    throw err;
  }
  connectivityListener?.(true);
  const payload = await response.json();
  if (response.status === 200) return { status: 200, body: payload as EditAcceptedBody };
  if (response.status === 409) return { status: 409, body: payload as ApiErrorBody };
  throw new ApiError(response.status, payload as ApiErrorBody);
}
