// Typed client for the annotation server. The fetch implementation is
// injectable so tests can fake or record network traffic.

import type {
  AdjudicationItem,
  CreatedSession,
  ItemView,
  LabelInput,
  SessionStats,
  SessionSummary,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public errorName: string,
    public detail: string,
  ) {
    super(`${errorName} (${status}): ${detail}`);
  }
}

export class NetworkError extends Error {}

const API = "/api/v1";

async function parseError(response: Response): Promise<ApiError> {
  let name = "HttpError";
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body === "object") {
      name = body.error ?? name;
      detail = body.detail ?? JSON.stringify(body);
    }
  } catch {
    // non-JSON error body: keep the status text
  }
  return new ApiError(response.status, name, detail);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${API}${path}`, {
        method,
        headers: {
          Authorization: `Bearer ${this.token}`,
          ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
        },
        ...(body !== undefined ? { body: JSON.stringify(body) } : {}),
      });
    } catch (cause) {
      throw new NetworkError(`request failed: ${String(cause)}`);
    }
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  summary(sessionId: string): Promise<SessionSummary> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  async items(sessionId: string): Promise<ItemView[]> {
    const body = await this.request<{ items: ItemView[] }>(
      "GET",
      `/sessions/${sessionId}/items`,
    );
    return body.items;
  }

  submitLabel(
    sessionId: string,
    itemId: string,
    label: LabelInput,
  ): Promise<ItemView> {
    return this.request(
      "POST",
      `/sessions/${sessionId}/items/${itemId}/label`,
      label,
    );
  }

  async adjudicationQueue(sessionId: string): Promise<AdjudicationItem[]> {
    const body = await this.request<{ items: AdjudicationItem[] }>(
      "GET",
      `/sessions/${sessionId}/adjudication`,
    );
    return body.items;
  }

  adjudicate(
    sessionId: string,
    itemId: string,
    label: LabelInput,
  ): Promise<AdjudicationItem> {
    return this.request(
      "POST",
      `/sessions/${sessionId}/items/${itemId}/adjudicate`,
      label,
    );
  }

  stats(sessionId: string): Promise<SessionStats> {
    return this.request("GET", `/sessions/${sessionId}/stats`);
  }

  async exportLabels(sessionId: string, force = false): Promise<string> {
    let response: Response;
    try {
      response = await this.fetchImpl(
        `${this.baseUrl}${API}/sessions/${sessionId}/export?force=${force}`,
        { headers: { Authorization: `Bearer ${this.token}` } },
      );
    } catch (cause) {
      throw new NetworkError(`request failed: ${String(cause)}`);
    }
    if (!response.ok) {
      throw await parseError(response);
    }
    return response.text();
  }
}

export async function createSession(
  baseUrl: string,
  body: {
    kind: string;
    rubric_version?: string;
    annotators: string[];
    adjudicator?: string | null;
    seed?: number | null;
    items: Array<{ item_id?: string; payload: object; meta?: object }>;
  },
  fetchImpl: FetchLike = (input, init) => fetch(input, init),
): Promise<CreatedSession> {
  const response = await fetchImpl(`${baseUrl}${API}/sessions`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!response.ok) {
    throw await parseError(response);
  }
  return (await response.json()) as CreatedSession;
}
