/** Thin typed client for the treefreeze service. */

import type {
  CreateSessionRequest,
  IncrementRequest,
  IncrementResponse,
  MetricsResponse,
  SessionView,
  TreePayload,
  UndoResponse,
  VariantInfo,
} from "./types.js";

/** The service could not be reached at all (down, wrong URL, …). */
export class ServiceUnreachable extends Error {
  constructor(baseUrl: string, cause: unknown) {
    super(`service unreachable at ${baseUrl}`);
    this.name = "ServiceUnreachable";
    this.cause = cause;
  }
}

/** A structured error response from the service. */
export class ApiError extends Error {
  readonly status: number;
  readonly error: string;
  readonly stage?: string;
  readonly position?: number;

  constructor(
    status: number,
    detail: { error?: string; message?: string; stage?: string; position?: number },
  ) {
    super(detail.message ?? `request failed with status ${status}`);
    this.name = "ApiError";
    this.status = status;
    this.error = detail.error ?? "unknown";
    this.stage = detail.stage;
    this.position = detail.position;
  }
}

export class Api {
  constructor(readonly baseUrl: string) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, {
        method,
        headers: body === undefined ? {} : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (cause) {
      throw new ServiceUnreachable(this.baseUrl, cause);
    }
    if (!response.ok) {
      let detail: Record<string, never> | { error?: string; message?: string } = {};
      try {
        detail = (await response.json()).detail ?? {};
      } catch {
        // non-JSON error body; keep the bare status
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  createSession(body: CreateSessionRequest): Promise<SessionView> {
    return this.request("POST", "/sessions", body);
  }

  getTree(sessionId: string): Promise<TreePayload> {
    return this.request("GET", `/sessions/${sessionId}/tree`);
  }

  async getVariants(sessionId: string): Promise<VariantInfo[]> {
    const data = await this.request<{ variants: VariantInfo[] }>(
      "GET",
      `/sessions/${sessionId}/variants`,
    );
    return data.variants;
  }

  setFrozen(sessionId: string, paths: number[][]): Promise<{ frozen_paths: number[][] }> {
    return this.request("PUT", `/sessions/${sessionId}/frozen`, { paths });
  }

  applyIncrement(sessionId: string, body: IncrementRequest): Promise<IncrementResponse> {
    return this.request("POST", `/sessions/${sessionId}/increments`, body);
  }

  undo(sessionId: string): Promise<UndoResponse> {
    return this.request("POST", `/sessions/${sessionId}/undo`);
  }

  getMetrics(sessionId: string): Promise<MetricsResponse> {
    return this.request("GET", `/sessions/${sessionId}/metrics`);
  }
}
