/** Contract: deleting a statement strikes it through optimistically, keeps the
 * strike on success, rolls back on failure, and the whole view equals what a
 * fresh client would render from the service alone (refresh safety). */

import { describe, expect, it } from "vitest";
import { ApiClient } from "../src/api";
import { CurationController } from "../src/controller";
import { MockBackend } from "./mock_backend";

async function setupWithAssay() {
  const backend = new MockBackend();
  const api = new ApiClient(backend.fetch);
  const controller = new CurationController(api);
  await controller.init();
  controller.setDraft("inhibition of protein kinase activity");
  await controller.submit();
  return { backend, api, controller };
}

function deleteRequests(backend: MockBackend): string[] {
  return backend.requests.filter((r) => r.method === "DELETE").map((r) => r.path);
}

function rowFor(html: string, sid: string): string {
  const match = new RegExp(`<li class="([^"]*)" data-sid="${sid}"`).exec(html);
  expect(match).not.toBeNull();
  return match![1]!;
}

describe("statement curation", () => {
  it("strikes the row through before the service answers", async () => {
    const { controller } = await setupWithAssay();
    const inFlight = controller.deleteStatement("s-p2");
    // not awaited yet: the optimistic render must already show the strike
    expect(rowFor(controller.lastHtml, "s-p2")).toBe("statement deleted");
    await inFlight;
    expect(rowFor(controller.lastHtml, "s-p2")).toBe("statement deleted");
  });

  it("decrements the remaining badge and the list count", async () => {
    const { controller } = await setupWithAssay();
    expect(controller.lastHtml).toContain(">3 of 3 statements<");
    expect(controller.lastHtml).toContain(">3 statements</span>");
    await controller.deleteStatement("s-p2");
    expect(controller.lastHtml).toContain(">2 of 3 statements<");
    expect(controller.lastHtml).toContain(">2 statements</span>");
  });

  it("sends exactly one delete for a double-click", async () => {
    const { backend, controller } = await setupWithAssay();
    const first = controller.deleteStatement("s-e1");
    const second = controller.deleteStatement("s-e1"); // row already pending
    await Promise.all([first, second]);
    expect(deleteRequests(backend)).toEqual(["/api/v1/assays/a00000001/statements/s-e1"]);

    const before = controller.lastHtml;
    await controller.deleteStatement("s-e1"); // row already deleted
    expect(deleteRequests(backend)).toHaveLength(1);
    expect(controller.lastHtml).toBe(before);
  });

  it("ignores a delete for a statement that is not in the view", async () => {
    const { backend, controller } = await setupWithAssay();
    await controller.deleteStatement("no-such-sid");
    expect(deleteRequests(backend)).toHaveLength(0);
  });

  it("rolls back and toasts when the service answers 404", async () => {
    const { backend, controller } = await setupWithAssay();
    backend.deleteResponds404 = true;
    await controller.deleteStatement("s-p1");
    expect(rowFor(controller.lastHtml, "s-p1")).toBe("statement");
    expect(controller.lastHtml).toContain(">3 of 3 statements<");
    expect(controller.lastHtml).toContain('data-role="toast"');
    expect(controller.lastHtml).toContain("delete failed");
  });

  it("rolls back and toasts when the service is unreachable", async () => {
    const { backend, controller } = await setupWithAssay();
    backend.failNextWith = "network";
    await controller.deleteStatement("s-p1");
    expect(rowFor(controller.lastHtml, "s-p1")).toBe("statement");
    expect(controller.lastHtml).toContain("service unreachable");
  });

  it("keeps deleted rows visible, struck through, without a delete button", async () => {
    const { controller } = await setupWithAssay();
    await controller.deleteStatement("s-p2");
    const html = controller.lastHtml;
    expect(rowFor(html, "s-p2")).toBe("statement deleted");
    expect(html).toContain("ATP"); // still shown, just struck
    const row = /<li class="statement deleted" data-sid="s-p2">.*?<\/li>/.exec(html)![0];
    expect(row).not.toContain('data-action="delete"');
  });

  it("renders the same view a fresh client builds from the service", async () => {
    const { backend, controller } = await setupWithAssay();
    await controller.deleteStatement("s-p2");

    const fresh = new CurationController(new ApiClient(backend.fetch));
    await fresh.init();
    await fresh.selectAssay("a00000001");
    expect(fresh.lastHtml).toBe(controller.lastHtml);
  });

  it("reloads an assay from the list with its curation intact", async () => {
    const { backend, controller } = await setupWithAssay();
    await controller.deleteStatement("s-e1");
    controller.setDraft("a second assay");
    await controller.submit(); // detail pane now shows assay 2

    await controller.selectAssay("a00000001");
    expect(controller.lastHtml).toContain('data-uid="a00000001"');
    expect(rowFor(controller.lastHtml, "s-e1")).toBe("statement deleted");
    expect(controller.lastHtml).toContain(">2 of 3 statements<");
    expect(
      backend.requests.filter((r) => r.path.startsWith("/api/v1/assays/a00000001?")),
    ).not.toHaveLength(0);
  });

  it("asks the service for deleted rows when loading an assay", async () => {
    const { backend, controller } = await setupWithAssay();
    await controller.selectAssay("a00000001");
    const last = backend.requests.at(-1)!;
    expect(last.path).toBe("/api/v1/assays/a00000001?include_deleted=true");
  });
});
