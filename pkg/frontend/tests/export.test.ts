/** Contract: export hands the service's curated JSONL through byte-for-byte —
 * deletions omitted, empty store gives an empty file, filename carries a
 * timestamp. */

import { describe, expect, it } from "vitest";
import { ApiClient } from "../src/api";
import { CurationController } from "../src/controller";
import { MockBackend } from "./mock_backend";

function setup() {
  const backend = new MockBackend();
  const api = new ApiClient(backend.fetch);
  const controller = new CurationController(api);
  return { backend, api, controller };
}

async function serviceExport(backend: MockBackend): Promise<string> {
  const response = await backend.fetch("/api/v1/export");
  return response.text();
}

describe("export", () => {
  it("returns the service export byte-for-byte", async () => {
    const { backend, controller } = setup();
    await controller.init();
    controller.setDraft("first assay");
    await controller.submit();
    controller.setDraft("second assay");
    await controller.submit();
    await controller.deleteStatement("s-p1"); // curate the second assay

    const { content } = await controller.exportCurated();
    expect(content).toBe(await serviceExport(backend));
    // sanity: the export format is not what a JSON round trip would produce,
    // so passing this test means the bytes were not re-serialized
    expect(content).toContain('"id": "a00000001"');
  });

  it("omits deleted statements from the export", async () => {
    const { controller } = setup();
    await controller.init();
    controller.setDraft("assay text");
    await controller.submit();
    await controller.deleteStatement("s-p2");

    const { content } = await controller.exportCurated();
    const lines = content.split("\n").filter((line) => line !== "");
    expect(lines).toHaveLength(1);
    const record = JSON.parse(lines[0]!) as {
      id: string;
      text: string;
      statements: { predicate: string; value: string; ontologized: boolean }[];
    };
    expect(record.id).toBe("a00000001");
    expect(record.text).toBe("assay text");
    expect(record.statements.map((s) => s.value)).toEqual(["DMSO", "IC50"]);
    expect(content).not.toContain("ATP");
  });

  it("exports an empty store as an empty file", async () => {
    const { controller } = setup();
    await controller.init();
    const { content } = await controller.exportCurated();
    expect(content).toBe("");
  });

  it("names the file with a compact timestamp", async () => {
    const { controller } = setup();
    await controller.init();
    const { filename } = await controller.exportCurated();
    expect(filename).toMatch(/^curated-\d{8}T\d{6}Z\.jsonl$/);
  });
});
