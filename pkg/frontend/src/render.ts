/** Pure HTML-string view layer. Every builder is a function of plain data and
 * returns markup; nothing here touches the DOM, so the whole view is testable
 * as strings. Interactive elements carry data-action / data-target attributes
 * that the browser glue (main.ts) wires up by delegation. */

import type { AssayDetail, AssaySummary, StatementWithFlag } from "./types";

export function escapeHtml(raw: string): string {
  return raw
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export interface ViewState {
  threshold: number;
  draft: string;
  submitting: boolean;
  banner: string | null;
  toast: string | null;
  failure: { message: string } | null;
  assays: AssaySummary[];
  current: AssayDetail | null;
  pending: ReadonlySet<string>;
}

function formatScore(score: number): string {
  return Number.isInteger(score) ? String(score) : score.toFixed(3);
}

function provenanceBadge(statement: StatementWithFlag): string {
  const label = `${statement.source} ${formatScore(statement.score)}`;
  return (
    `<span class="provenance" title="${escapeHtml(String(statement.score))}">` +
    `${escapeHtml(label)}</span>`
  );
}

function statementRow(statement: StatementWithFlag, pending: ReadonlySet<string>): string {
  const struck = statement.deleted || pending.has(statement.statement_id);
  const classes = struck ? "statement deleted" : "statement";
  const ontology = statement.ontologized ? "" : ' <span class="plain-text">free text</span>';
  const deleteButton = statement.deleted
    ? ""
    : `<button data-action="delete" data-target="${escapeHtml(statement.statement_id)}">remove</button>`;
  return (
    `<li class="${classes}" data-sid="${escapeHtml(statement.statement_id)}">` +
    `<span class="value">${escapeHtml(statement.value)}</span>${ontology} ` +
    provenanceBadge(statement) +
    deleteButton +
    `</li>`
  );
}

/** Groups statements by predicate in first-appearance order; within a group
 * the rows keep the response order. */
export function renderStatements(
  statements: readonly StatementWithFlag[],
  pending: ReadonlySet<string>,
): string {
  const order: string[] = [];
  const groups = new Map<string, StatementWithFlag[]>();
  for (const statement of statements) {
    let bucket = groups.get(statement.predicate);
    if (bucket === undefined) {
      bucket = [];
      groups.set(statement.predicate, bucket);
      order.push(statement.predicate);
    }
    bucket.push(statement);
  }
  const sections = order.map((predicate) => {
    const rows = (groups.get(predicate) ?? [])
      .map((statement) => statementRow(statement, pending))
      .join("");
    return (
      `<section class="predicate-group">` +
      `<h3 class="predicate">${escapeHtml(predicate)}</h3>` +
      `<ul>${rows}</ul></section>`
    );
  });
  return sections.join("");
}

function remainingBadge(detail: AssayDetail, pending: ReadonlySet<string>): string {
  const total = detail.statements.length;
  const remaining = detail.statements.filter(
    (statement) => !statement.deleted && !pending.has(statement.statement_id),
  ).length;
  return `<span data-role="remaining">${remaining} of ${total} statements</span>`;
}

function renderDetail(state: ViewState): string {
  const detail = state.current;
  if (detail === null) {
    return `<section data-role="detail" class="empty">no assay selected</section>`;
  }
  return (
    `<section data-role="detail" data-uid="${escapeHtml(detail.assay_uid)}">` +
    `<h2>${escapeHtml(detail.assay_uid)}</h2>` +
    `<p class="assay-text">${escapeHtml(detail.text)}</p>` +
    remainingBadge(detail, state.pending) +
    renderStatements(detail.statements, state.pending) +
    `</section>`
  );
}

function renderAssayList(assays: readonly AssaySummary[]): string {
  const rows = assays
    .map(
      (assay) =>
        `<li data-uid="${escapeHtml(assay.assay_uid)}">` +
        `<button data-action="select" data-target="${escapeHtml(assay.assay_uid)}">` +
        `${escapeHtml(assay.assay_uid)}</button>` +
        `<span class="count">${assay.n_statements} statements</span></li>`,
    )
    .join("");
  return `<ul data-role="assay-list">${rows}</ul>`;
}

function renderComposer(state: ViewState): string {
  const disabled = state.draft.trim() === "" || state.submitting ? " disabled" : "";
  const options = [1, 2, 3, 4, 5]
    .map(
      (value) =>
        `<option value="${value}"${value === state.threshold ? " selected" : ""}>` +
        `${value}</option>`,
    )
    .join("");
  return (
    `<section class="composer">` +
    `<textarea data-role="draft" placeholder="paste or drop an assay description">` +
    `${escapeHtml(state.draft)}</textarea>` +
    `<label>minimum cluster frequency ` +
    `<select data-role="threshold">${options}</select></label>` +
    `<button data-role="submit" data-action="submit"${disabled}>semantify</button>` +
    `<button data-action="export">export curated</button>` +
    `</section>`
  );
}

function renderNotices(state: ViewState): string {
  const parts: string[] = [];
  if (state.banner !== null) {
    parts.push(`<div data-role="banner" class="banner">${escapeHtml(state.banner)}</div>`);
  }
  if (state.failure !== null) {
    parts.push(
      `<div data-role="failure" class="failure">` +
        `${escapeHtml(state.failure.message)} ` +
        `<button data-action="retry">retry</button></div>`,
    );
  }
  if (state.toast !== null) {
    parts.push(`<div data-role="toast" class="toast">${escapeHtml(state.toast)}</div>`);
  }
  return parts.join("");
}

export function renderApp(state: ViewState): string {
  return (
    `<main>` +
    `<h1>bioassay curation</h1>` +
    renderNotices(state) +
    renderComposer(state) +
    `<div class="columns">` +
    `<nav>${renderAssayList(state.assays)}</nav>` +
    renderDetail(state) +
    `</div>` +
    `</main>`
  );
}
