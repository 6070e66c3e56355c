/** In-memory stand-in for the curation service. Implements the same routes,
 * status codes, and error envelopes as the real REST API so the UI contract
 * tests run without a server. */

import type { FetchLike } from "../src/api";
import type { Statement } from "../src/types";

export interface MockRecord {
  assay_uid: string;
  text: string;
  predicted: Statement[];
  deleted: Set<string>;
  created: string;
  updated: string;
}

export interface CapturedRequest {
  path: string;
  method: string;
  body: unknown;
}

/** Three statements over two predicates; scores are cluster member counts, so
 * a threshold of 2 keeps s-p1 and s-e1 only. */
export const FIXTURE: Statement[] = [
  {
    statement_id: "s-p1",
    predicate: "has participant",
    value: "DMSO",
    ontologized: true,
    source: "cluster:3",
    score: 2,
  },
  {
    statement_id: "s-p2",
    predicate: "has participant",
    value: "ATP",
    ontologized: true,
    source: "cluster:3",
    score: 1,
  },
  {
    statement_id: "s-e1",
    predicate: "has endpoint",
    value: "IC50",
    ontologized: true,
    source: "cluster:3",
    score: 2,
  },
];

/** Serializes the way the service writes export lines: keys sorted, ", " and
 * ": " separators. Distinct from JSON.stringify output on purpose — the UI
 * must pass export bytes through untouched, and this format would expose any
 * parse/re-stringify round trip. */
function exportJson(value: unknown): string {
  if (value === null || typeof value === "boolean" || typeof value === "number") {
    return JSON.stringify(value);
  }
  if (typeof value === "string") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return "[" + value.map(exportJson).join(", ") + "]";
  }
  const entries = Object.entries(value as Record<string, unknown>).sort(([a], [b]) =>
    a < b ? -1 : a > b ? 1 : 0,
  );
  return (
    "{" +
    entries.map(([key, val]) => JSON.stringify(key) + ": " + exportJson(val)).join(", ") +
    "}"
  );
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function errorResponse(status: number, code: string, message: string): Response {
  return jsonResponse(status, { error: { code, message } });
}

export class MockBackend {
  readonly records = new Map<string, MockRecord>();
  readonly order: string[] = [];
  readonly requests: CapturedRequest[] = [];
  counter = 0;
  modelLoaded = true;
  failNextWith: "network" | null = null;
  deleteResponds404 = false;
  predictions: Statement[] = FIXTURE;

  readonly fetch: FetchLike = async (input, init) => {
    const method = init?.method ?? "GET";
    const rawBody = typeof init?.body === "string" ? init.body : null;
    let body: unknown = null;
    if (rawBody !== null) {
      try {
        body = JSON.parse(rawBody);
      } catch {
        body = rawBody;
      }
    }
    this.requests.push({ path: input, method, body });
    if (this.failNextWith === "network") {
      this.failNextWith = null;
      throw new TypeError("fetch failed");
    }
    const url = new URL(input, "http://mock");
    return this.route(url, method, body);
  };

  private route(url: URL, method: string, body: unknown): Response {
    const path = url.pathname;
    if (path === "/api/v1/health" && method === "GET") {
      return jsonResponse(200, { status: "ok", model_loaded: this.modelLoaded });
    }
    if (path === "/api/v1/assays" && method === "POST") {
      return this.createAssay(body);
    }
    if (path === "/api/v1/assays" && method === "GET") {
      return jsonResponse(200, {
        assays: this.order.map((uid) => {
          const record = this.records.get(uid)!;
          return {
            assay_uid: record.assay_uid,
            created: record.created,
            n_statements: record.predicted.length - record.deleted.size,
          };
        }),
      });
    }
    const detailMatch = /^\/api\/v1\/assays\/([^/]+)$/.exec(path);
    if (detailMatch !== null && method === "GET") {
      return this.getAssay(
        decodeURIComponent(detailMatch[1]!),
        url.searchParams.get("include_deleted") === "true",
      );
    }
    const deleteMatch = /^\/api\/v1\/assays\/([^/]+)\/statements\/([^/]+)$/.exec(path);
    if (deleteMatch !== null && method === "DELETE") {
      return this.deleteStatement(
        decodeURIComponent(deleteMatch[1]!),
        decodeURIComponent(deleteMatch[2]!),
      );
    }
    if (path === "/api/v1/export" && method === "GET") {
      return this.exportRecords();
    }
    return errorResponse(404, "404", "Not Found");
  }

  private createAssay(body: unknown): Response {
    if (!this.modelLoaded) {
      return errorResponse(409, "no_model", "no model is loaded; activate one first");
    }
    if (typeof body !== "object" || body === null || Array.isArray(body)) {
      return errorResponse(422, "invalid_body", "request body must be a JSON object");
    }
    const payload = body as { text?: unknown; threshold?: unknown };
    if (typeof payload.text !== "string" || payload.text.trim() === "") {
      return errorResponse(422, "empty_text", "text must be a nonempty string");
    }
    const threshold = payload.threshold ?? 1;
    if (typeof threshold !== "number" || !Number.isInteger(threshold) || threshold < 1) {
      return errorResponse(422, "invalid_threshold", "cluster threshold must be an integer >= 1");
    }
    this.counter += 1;
    const uid = `a${String(this.counter).padStart(8, "0")}`;
    const stamp = new Date(Date.UTC(2026, 0, 1, 0, 0, this.counter)).toISOString();
    const record: MockRecord = {
      assay_uid: uid,
      text: payload.text,
      predicted: this.predictions.filter((statement) => statement.score >= threshold),
      deleted: new Set(),
      created: stamp,
      updated: stamp,
    };
    this.records.set(uid, record);
    this.order.push(uid);
    return jsonResponse(201, { assay_uid: uid, statements: record.predicted });
  }

  private getAssay(uid: string, includeDeleted: boolean): Response {
    const record = this.records.get(uid);
    if (record === undefined) {
      return errorResponse(404, "unknown_assay", `no assay with uid ${uid}`);
    }
    const statements = record.predicted
      .map((statement) => ({
        ...statement,
        deleted: record.deleted.has(statement.statement_id),
      }))
      .filter((statement) => includeDeleted || !statement.deleted);
    return jsonResponse(200, {
      assay_uid: record.assay_uid,
      text: record.text,
      statements,
      created: record.created,
      updated: record.updated,
    });
  }

  private deleteStatement(uid: string, sid: string): Response {
    const record = this.records.get(uid);
    if (record === undefined) {
      return errorResponse(404, "unknown_assay", `no assay with uid ${uid}`);
    }
    if (
      this.deleteResponds404 ||
      !record.predicted.some((statement) => statement.statement_id === sid)
    ) {
      return errorResponse(404, "unknown_statement", `no statement ${sid} in ${uid}`);
    }
    record.deleted.add(sid);
    record.updated = new Date(Date.UTC(2026, 0, 2)).toISOString();
    return jsonResponse(200, { remaining: record.predicted.length - record.deleted.size });
  }

  private exportRecords(): Response {
    const lines = this.order.map((uid) => {
      const record = this.records.get(uid)!;
      const statements = record.predicted
        .filter((statement) => !record.deleted.has(statement.statement_id))
        .map((statement) => ({
          ontologized: statement.ontologized,
          predicate: statement.predicate,
          value: statement.value,
        }));
      return exportJson({
        id: record.assay_uid,
        statements,
        text: record.text,
      });
    });
    const body = lines.length > 0 ? lines.join("\n") + "\n" : "";
    return new Response(body, {
      status: 200,
      headers: { "content-type": "application/x-ndjson" },
    });
  }
}
