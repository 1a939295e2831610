/** HTTP client for the engine service.
 *
 * Responses are parsed losslessly and validated; payload values reach the
 * rest of the app only through these typed wrappers. A stale or wrong handle
 * surfaces as StaleHandleError so views can offer a re-fetch prompt instead
 * of crashing.
 */

import { parseLossless } from "./lit";
import {
  CurvePayload,
  FrontPayload,
  SweepResponse,
  WhatifPayload,
  curveSchema,
  errorSchema,
  frontSchema,
  healthSchema,
  sweepResponseSchema,
  whatifSchema,
} from "./schemas";

export interface CellQuery {
  space: string;
  justice: string;
  class: string;
  scope: string;
  split: string;
}

export class ServiceError extends Error {
  readonly status: number;
  readonly detail: string;

  constructor(status: number, detail: string) {
    super(`service error ${status}: ${detail}`);
    this.name = "ServiceError";
    this.status = status;
    this.detail = detail;
  }
}

export class StaleHandleError extends ServiceError {
  constructor(status: number, detail: string) {
    super(status, detail);
    this.name = "StaleHandleError";
  }
}

/** Validate with the schema but return the lossless-parsed original: zod
 * rebuilds objects in schema key order, which would break byte-identical
 * re-serialization of payload subtrees (exports, canonical records). */
function validated<T>(schema: { parse(v: unknown): T }, raw: string): T {
  const data = parseLossless(raw);
  schema.parse(data);
  return data as T;
}

async function fail(resp: Response): Promise<never> {
  let detail = resp.statusText;
  try {
    const body = errorSchema.parse(JSON.parse(await resp.text()));
    if (typeof body.detail === "string") {
      detail = body.detail;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  if (resp.status === 404 && detail.includes("handle")) {
    throw new StaleHandleError(resp.status, detail);
  }
  throw new ServiceError(resp.status, detail);
}

export class Client {
  readonly base: string;

  constructor(base: string) {
    this.base = base.replace(/\/+$/, "");
  }

  private async getText(path: string, signal?: AbortSignal): Promise<string> {
    const resp = await fetch(this.base + path, { signal });
    if (!resp.ok) {
      await fail(resp);
    }
    return resp.text();
  }

  private async postText(path: string, body: string, signal?: AbortSignal): Promise<string> {
    const resp = await fetch(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body,
      signal,
    });
    if (!resp.ok) {
      await fail(resp);
    }
    return resp.text();
  }

  async health(): Promise<void> {
    validated(healthSchema, await this.getText("/health"));
  }

  async submitSweep(configText: string, signal?: AbortSignal): Promise<SweepResponse> {
    const text = await this.postText("/sweeps", configText, signal);
    return validated(sweepResponseSchema, text);
  }

  /** Raw text is returned too: exports and fidelity checks read tokens from it. */
  async getFront(
    handle: string,
    q: CellQuery,
    signal?: AbortSignal,
  ): Promise<{ payload: FrontPayload; raw: string }> {
    const params = new URLSearchParams(q as unknown as Record<string, string>);
    const raw = await this.getText(
      `/sweeps/${encodeURIComponent(handle)}/fronts?${params.toString()}`,
      signal,
    );
    return { payload: validated(frontSchema, raw), raw };
  }

  async getCurve(handle: string, policyId: string, signal?: AbortSignal): Promise<CurvePayload> {
    const raw = await this.getText(
      `/sweeps/${encodeURIComponent(handle)}/policies/${encodeURIComponent(policyId)}/curve`,
      signal,
    );
    return validated(curveSchema, raw);
  }

  async postWhatif(
    handle: string,
    specText: string,
    signal?: AbortSignal,
  ): Promise<{ payload: WhatifPayload; raw: string }> {
    const raw = await this.postText(
      `/sweeps/${encodeURIComponent(handle)}/whatif`,
      specText,
      signal,
    );
    return { payload: validated(whatifSchema, raw), raw };
  }
}

/** Serializer for in-flight what-ifs: a new submission aborts the previous
 * one, so late responses never overwrite newer edits. */
export class LatestOnly {
  private controller: AbortController | null = null;

  async run<T>(task: (signal: AbortSignal) => Promise<T>): Promise<T> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    try {
      return await task(controller.signal);
    } finally {
      if (this.controller === controller) {
        this.controller = null;
      }
    }
  }

  cancel(): void {
    this.controller?.abort();
    this.controller = null;
  }
}

export function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === "AbortError";
}
