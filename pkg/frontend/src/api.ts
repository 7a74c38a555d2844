/** Typed client for the labeling session API. */

export interface SessionInfo {
  id: string;
  dataset: string;
  n_points: number;
  n_classes: number;
  n_clusters: number;
  acquisition: string;
  policy: string;
  iteration: number;
  labeled: number[];
}

export interface PointsPayload {
  x: number[];
  y: number[];
  predicted: number[];
  scores: (number | null)[];
  labeled: number[];
  observed: Record<string, number>;
  suggestion: number;
}

export interface MetricsRecord {
  iteration: number;
  query_index: number;
  class: number;
  accuracy: number;
  cluster_proportion: number;
  tau: number;
  ms: number;
}

export interface MetricsPayload {
  records: MetricsRecord[];
}

export interface LabelResult {
  ok: boolean;
  iteration: number;
  accuracy: number;
  cluster_proportion: number;
  tau: number;
  suggestion: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function getJson<T>(url: string): Promise<T> {
  const resp = await fetch(url);
  if (!resp.ok) {
    throw new ApiError(resp.status, await errorText(resp));
  }
  return (await resp.json()) as T;
}

async function errorText(resp: Response): Promise<string> {
  try {
    const body = (await resp.json()) as { error?: string };
    return body.error ?? resp.statusText;
  } catch {
    return resp.statusText;
  }
}

/** All methods hit the same origin unless a base URL is supplied. */
export class ApiClient {
  constructor(private readonly base: string = "") {}

  session(): Promise<SessionInfo> {
    return getJson(`${this.base}/api/session`);
  }

  points(): Promise<PointsPayload> {
    return getJson(`${this.base}/api/points`);
  }

  suggest(): Promise<{ index: number | null }> {
    return getJson(`${this.base}/api/suggest`);
  }

  metrics(): Promise<MetricsPayload> {
    return getJson(`${this.base}/api/metrics`);
  }

  async label(index: number, cls: number): Promise<LabelResult> {
    const resp = await fetch(`${this.base}/api/label`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ index, class: cls }),
    });
    if (!resp.ok) {
      throw new ApiError(resp.status, await errorText(resp));
    }
    return (await resp.json()) as LabelResult;
  }
}
