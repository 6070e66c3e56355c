/** Application state machine. Holds the single source of truth for the UI,
 * talks to the service through ApiClient, and re-renders after every state
 * change. The rendered HTML is exposed via lastHtml so tests can assert on the
 * exact markup without a DOM. */

import { ApiClient, ApiError, NetworkError } from "./api";
import { renderApp, type ViewState } from "./render";
import type { AssayDetail, AssaySummary } from "./types";

export interface AppState extends ViewState {
  assays: AssaySummary[];
  current: AssayDetail | null;
  pending: Set<string>;
}

function initialState(): AppState {
  return {
    threshold: 1,
    draft: "",
    submitting: false,
    banner: null,
    toast: null,
    failure: null,
    assays: [],
    current: null,
    pending: new Set(),
  };
}

const MODEL_BANNER =
  "No model is active. Train one (semassay train or POST /api/v1/models/train) " +
  "and activate it before submitting assays.";

export class CurationController {
  readonly state: AppState = initialState();
  private html = "";
  private lastAction: (() => Promise<void>) | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly onRender?: (html: string) => void,
  ) {
    this.render();
  }

  get lastHtml(): string {
    return this.html;
  }

  private render(): void {
    this.html = renderApp(this.state);
    this.onRender?.(this.html);
  }

  async init(): Promise<void> {
    try {
      const health = await this.api.health();
      this.state.banner = health.model_loaded ? null : MODEL_BANNER;
      this.state.assays = await this.api.listAssays();
      this.state.failure = null;
    } catch (error) {
      this.fail(error, () => this.init());
    }
    this.render();
  }

  setDraft(draft: string): void {
    this.state.draft = draft;
    this.render();
  }

  setThreshold(threshold: number): void {
    this.state.threshold = Math.min(5, Math.max(1, Math.round(threshold)));
    this.render();
  }

  async submit(): Promise<void> {
    const text = this.state.draft;
    if (text.trim() === "" || this.state.submitting) {
      return;
    }
    this.state.submitting = true;
    this.state.toast = null;
    this.render();
    try {
      const created = await this.api.createAssay(text, this.state.threshold);
      // The detail pane always mirrors what the service stores, so fetch the
      // persisted record rather than trusting the create response alone.
      this.state.current = await this.api.getAssay(created.assay_uid);
      this.state.assays = await this.api.listAssays();
      this.state.draft = "";
      this.state.banner = null;
      this.state.failure = null;
    } catch (error) {
      if (error instanceof ApiError && error.code === "no_model") {
        this.state.banner = MODEL_BANNER;
      } else {
        this.fail(error, () => this.submit());
      }
    } finally {
      this.state.submitting = false;
      this.render();
    }
  }

  async selectAssay(uid: string): Promise<void> {
    try {
      this.state.current = await this.api.getAssay(uid);
      this.state.pending = new Set();
      this.state.failure = null;
    } catch (error) {
      this.fail(error, () => this.selectAssay(uid));
    }
    this.render();
  }

  async deleteStatement(sid: string): Promise<void> {
    const detail = this.state.current;
    if (detail === null) {
      return;
    }
    const row = detail.statements.find((statement) => statement.statement_id === sid);
    if (row === undefined || row.deleted || this.state.pending.has(sid)) {
      return; // unknown row, already curated away, or a double-click mid-flight
    }
    this.state.pending.add(sid);
    this.render(); // strike through immediately, before the request settles
    try {
      const remaining = await this.api.deleteStatement(detail.assay_uid, sid);
      row.deleted = true;
      const summary = this.state.assays.find(
        (assay) => assay.assay_uid === detail.assay_uid,
      );
      if (summary !== undefined) {
        summary.n_statements = remaining;
      }
    } catch (error) {
      if (error instanceof ApiError) {
        this.state.toast = `delete failed: ${error.message}`;
      } else {
        this.state.toast = "delete failed: service unreachable";
      }
    } finally {
      this.state.pending.delete(sid);
      this.render();
    }
  }

  async exportCurated(): Promise<{ filename: string; content: string }> {
    const content = await this.api.exportCurated();
    const stamp = new Date()
      .toISOString()
      .replace(/\.\d{3}Z$/, "Z")
      .replaceAll("-", "")
      .replaceAll(":", "");
    return { filename: `curated-${stamp}.jsonl`, content };
  }

  async retry(): Promise<void> {
    const action = this.lastAction;
    this.lastAction = null;
    this.state.failure = null;
    this.render();
    if (action !== null) {
      await action();
    }
  }

  private fail(error: unknown, action: () => Promise<void>): void {
    if (error instanceof NetworkError) {
      this.state.failure = { message: error.message };
      this.lastAction = action;
    } else if (error instanceof ApiError) {
      this.state.toast = error.message;
    } else {
      this.state.toast = String(error);
    }
  }
}
