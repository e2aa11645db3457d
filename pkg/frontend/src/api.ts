/** Thin fetch client for the espace API. All knowledge of ranking and
 *  structure stays on the server; this module only moves payloads. */

import type {
  AskResponse,
  EntryResponse,
  HealthResponse,
  OverviewResponse,
  SummaryChildrenResponse,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public body?: unknown,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (err) {
    throw new ApiError(0, `service unreachable: ${String(err)}`);
  }
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    // structured error bodies are optional on transport-level failures
  }
  if (!response.ok) {
    const message =
      body && typeof body === 'object' && 'error' in (body as object)
        ? String((body as { error: string }).error)
        : `HTTP ${response.status}`;
    throw new ApiError(response.status, message, body);
  }
  return body as T;
}

export class ApiClient {
  constructor(public base: string = '') {}

  health(): Promise<HealthResponse> {
    return request(`${this.base}/api/health`);
  }

  entry(): Promise<EntryResponse> {
    return request(`${this.base}/api/entry`);
  }

  overview(uri: string): Promise<OverviewResponse> {
    return request(`${this.base}/api/overview/${encodeURIComponent(uri)}`);
  }

  summaryChildren(nodeId: string): Promise<SummaryChildrenResponse> {
    return request(
      `${this.base}/api/summary/${encodeURIComponent(nodeId)}/children`,
    );
  }

  ask(question: string): Promise<AskResponse> {
    return request(`${this.base}/api/ask`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ question }),
    });
  }
}
