/** Typed REST client for the curation service. All errors surface as either
 * ApiError (the service answered with its error envelope) or NetworkError
 * (the service could not be reached). */

import { z } from "zod";
import {
  assayDetailSchema,
  assayListSchema,
  createdAssaySchema,
  deleteResultSchema,
  healthSchema,
  type AssayDetail,
  type AssaySummary,
  type CreatedAssay,
  type Health,
} from "./types";

const errorEnvelopeSchema = z.object({
  error: z.object({ code: z.string(), message: z.string() }),
});

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class NetworkError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "NetworkError";
  }
}

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly fetchImpl: FetchLike,
    private readonly base: string = "",
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.base + path, init);
    } catch (cause) {
      throw new NetworkError(`cannot reach the curation service: ${String(cause)}`);
    }
    if (!response.ok) {
      let code = String(response.status);
      let message = `HTTP ${response.status}`;
      try {
        const envelope = errorEnvelopeSchema.parse(await response.json());
        code = envelope.error.code;
        message = envelope.error.message;
      } catch {
        // not the service's envelope; keep the generic status text
      }
      throw new ApiError(response.status, code, message);
    }
    return response;
  }

  private async json<T>(
    schema: z.ZodType<T>,
    path: string,
    init?: RequestInit,
  ): Promise<T> {
    const response = await this.request(path, init);
    return schema.parse(await response.json());
  }

  health(): Promise<Health> {
    return this.json(healthSchema, "/api/v1/health");
  }

  createAssay(text: string, threshold: number): Promise<CreatedAssay> {
    return this.json(createdAssaySchema, "/api/v1/assays", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text, threshold }),
    });
  }

  listAssays(): Promise<AssaySummary[]> {
    return this.json(assayListSchema, "/api/v1/assays").then((body) => body.assays);
  }

  getAssay(uid: string): Promise<AssayDetail> {
    const path = `/api/v1/assays/${encodeURIComponent(uid)}?include_deleted=true`;
    return this.json(assayDetailSchema, path);
  }

  deleteStatement(uid: string, sid: string): Promise<number> {
    const path =
      `/api/v1/assays/${encodeURIComponent(uid)}` +
      `/statements/${encodeURIComponent(sid)}`;
    return this.json(deleteResultSchema, path, { method: "DELETE" }).then(
      (body) => body.remaining,
    );
  }

  async exportCurated(): Promise<string> {
    const response = await this.request("/api/v1/export");
    return response.text();
  }
}
