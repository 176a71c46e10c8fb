/**
 * HTTP client for the solver service (/v1/solve, /v1/resolve, /v1/health).
 *
 * At most one solve or resolve request is in flight per client; starting a
 * new one aborts the previous, which then rejects with kind "cancelled".
 */

import { TreeDocument, treeDocumentFromJson } from "./treeJson.js";

export interface SolveScore {
  readonly normalized: number;
  readonly raw: number;
}

export interface SolveResponse {
  readonly tree: TreeDocument;
  readonly score: SolveScore;
  /** Solver counters and timings, reported as-is. */
  readonly stats: Record<string, unknown>;
}

export interface SolveOptions {
  /** Overall budget; resolve uses remainingBudget instead. */
  budget?: number;
  tieBreak?: "node-count" | "random";
  seed?: number;
}

export type ClientErrorKind = "http" | "network" | "cancelled";

export class ClientError extends Error {
  constructor(
    message: string,
    readonly kind: ClientErrorKind,
    readonly status?: number,
    /** Offending request field reported by the server, if any. */
    readonly field?: string,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

function asRecord(value: unknown, what: string): Record<string, unknown> {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    throw new ClientError(`malformed ${what} in server response`, "http");
  }
  return value as Record<string, unknown>;
}

function asNumber(value: unknown, what: string): number {
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new ClientError(`malformed ${what} in server response`, "http");
  }
  return value;
}

export class SolveClient {
  private inFlight: AbortController | null = null;

  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  async health(): Promise<{ status: string; version: string }> {
    const resp = await this.request("GET", "/v1/health", undefined, null);
    const body = asRecord(await resp.json(), "health body");
    return { status: String(body.status), version: String(body.version) };
  }

  /** Solve a scenario from its root state. */
  async solve(scenario: unknown, options: SolveOptions = {}): Promise<SolveResponse> {
    const body: Record<string, unknown> = { scenario, ...optionFields(options) };
    if (options.budget !== undefined) body.budget = options.budget;
    return this.solveRequest("/v1/solve", body);
  }

  /** Re-solve from an intermediate state with the residual budget. */
  async resolve(
    scenario: unknown,
    currentState: readonly number[],
    remainingBudget: number,
    options: Omit<SolveOptions, "budget"> = {},
  ): Promise<SolveResponse> {
    const body = {
      scenario,
      current_state: [...currentState],
      remaining_budget: remainingBudget,
      ...optionFields(options),
    };
    return this.solveRequest("/v1/resolve", body);
  }

  /** Abort the in-flight solve or resolve request, if any. */
  cancel(): void {
    this.inFlight?.abort();
    this.inFlight = null;
  }

  private async solveRequest(
    path: string,
    body: Record<string, unknown>,
  ): Promise<SolveResponse> {
    this.inFlight?.abort();
    const controller = new AbortController();
    this.inFlight = controller;
    try {
      const resp = await this.request("POST", path, body, controller);
      const data = asRecord(await resp.json(), "body");
      const score = asRecord(data.score, "score");
      return {
        tree: treeDocumentFromJson(data.tree),
        score: {
          normalized: asNumber(score.normalized, "score.normalized"),
          raw: asNumber(score.raw, "score.raw"),
        },
        stats: asRecord(data.stats, "stats"),
      };
    } finally {
      if (this.inFlight === controller) this.inFlight = null;
    }
  }

  private async request(
    method: string,
    path: string,
    body: Record<string, unknown> | undefined,
    controller: AbortController | null,
  ): Promise<Response> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(`${this.baseUrl}${path}`, {
        method,
        headers: body === undefined ? undefined : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
        signal: controller?.signal,
      });
    } catch (err) {
      if (controller?.signal.aborted) {
        throw new ClientError("request superseded by a newer one", "cancelled");
      }
      const detail = err instanceof Error ? err.message : String(err);
      throw new ClientError(`server unreachable: ${detail}`, "network");
    }
    if (!resp.ok) {
      throw await errorFromResponse(resp);
    }
    return resp;
  }
}

function optionFields(options: Omit<SolveOptions, "budget">): Record<string, unknown> {
  const fields: Record<string, unknown> = {};
  if (options.tieBreak !== undefined) fields.tie_break = options.tieBreak;
  if (options.seed !== undefined) fields.seed = options.seed;
  return fields;
}

async function errorFromResponse(resp: Response): Promise<ClientError> {
  let message = `server returned ${resp.status}`;
  let field: string | undefined;
  try {
    const body = await resp.json();
    const error = (body as Record<string, unknown>)?.error;
    if (typeof error === "object" && error !== null) {
      const record = error as Record<string, unknown>;
      if (typeof record.message === "string") message = record.message;
      if (typeof record.field === "string") field = record.field;
    }
  } catch {
    // non-JSON error body; keep the status message
  }
  return new ClientError(message, "http", resp.status, field);
}
