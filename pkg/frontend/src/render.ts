// Rendering is a pure function of SessionState: every function returns an
// HTML string, which keeps theview snapshot-testable without a DOM.

import { SessionState, Tab, canSubmit } from "./state";
import { AskResponse, OntologyCatalog, ResultSetJson, TermJson, isBoolean } from "./types";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function shortIri(iri: string): string {
  const tail = iri.split(/[/#]/).filter(Boolean).pop();
  return tail ?? iri;
}

export function renderTerm(term: TermJson): string {
  if (term.type === "uri") {
    return `<span class="term uri" title="${escapeHtml(term.value)}">${escapeHtml(shortIri(term.value))}</span>`;
  }
  return `<span class="term literal">${escapeHtml(term.value)}</span>`;
}

export function renderAnswersTable(answers: ResultSetJson | null): string {
  if (answers === null) {
    return `<p class="empty">Query was not executed.</p>`;
  }
  if (isBoolean(answers)) {
    return `<p class="boolean-answer">${answers.boolean ? "Yes" : "No"}</p>`;
  }
  if (answers.rows.length === 0) {
    return `<p class="empty">No results.</p>`;
  }
  const head = answers.vars.map((v) => `<th>?${escapeHtml(v)}</th>`).join("");
  const body = answers.rows
    .map(
      (row) =>
        `<tr>${answers.vars.map((v) => `<td>${renderTerm(row[v])}</td>`).join("")}</tr>`
    )
    .join("");
  return `<table class="answers"><thead><tr>${head}</tr></thead><tbody>${body}</tbody></table>`;
}

export function renderSparqlTab(response: AskResponse): string {
  const rewriteNote =
    response.sparql === response.rewrittenSparql
      ? `<p class="note">No materialized rewrite applied.</p>`
      : `<h3>After materialized rewrite</h3><pre class="sparql rewritten">${escapeHtml(response.rewrittenSparql)}</pre>`;
  return (
    `<h3>Generated query</h3><pre class="sparql generated">${escapeHtml(response.sparql)}</pre>` +
    rewriteNote
  );
}

export function renderTraceTab(response: AskResponse): string {
  return `<pre class="trace">${escapeHtml(JSON.stringify(response.trace, null, 2))}</pre>`;
}

function tabButton(current: Tab, tab: Tab, label: string): string {
  const active = current === tab ? " active" : "";
  return `<button class="tab${active}" data-tab="${tab}">${label}</button>`;
}

export function renderResultPanel(state: SessionState): string {
  const response = state.current;
  if (!response) {
    return `<section id="results" class="placeholder">Ask a question to see answers, the generated query, and the annotation trace.</section>`;
  }
  let body: string;
  if (state.tab === "answers") {
    body = renderAnswersTable(response.answers);
  } else if (state.tab === "sparql") {
    body = renderSparqlTab(response);
  } else {
    body = renderTraceTab(response);
  }
  return (
    `<section id="results">` +
    `<nav class="tabs">${tabButton(state.tab, "answers", "Answers")}${tabButton(
      state.tab,
      "sparql",
      "SPARQL"
    )}${tabButton(state.tab, "trace", "Trace")}</nav>` +
    `<div class="tab-body">${body}</div>` +
    `</section>`
  );
}

export function renderErrorBanner(state: SessionState): string {
  if (!state.error) {
    return "";
  }
  return `<div id="error-banner" role="alert">${escapeHtml(state.error)}</div>`;
}

export function renderHistory(state: SessionState): string {
  if (state.history.length === 0) {
    return "";
  }
  const items = state.history
    .map(
      (entry, i) =>
        `<li><button class="history-item" data-history="${i}">${escapeHtml(entry.question)}</button></li>`
    )
    .join("");
  return `<section id="history"><h2>History</h2><ul>${items}</ul></section>`;
}

export function renderSidebar(catalog: OntologyCatalog | null, visible: boolean): string {
  if (!visible || catalog === null) {
    return "";
  }
  const classes = catalog.classes
    .filter((c) => c.label !== "feature")
    .map(
      (c) =>
        `<li><button class="insert" data-insert="${escapeHtml(c.label)}">${escapeHtml(c.label)}</button>` +
        ` <span class="count">${c.features}</span></li>`
    )
    .join("");
  const seen = new Set<string>();
  const properties = catalog.properties
    .filter((p) => (seen.has(p.iri) ? false : (seen.add(p.iri), true)))
    .map(
      (p) =>
        `<li><button class="insert" data-insert="${escapeHtml(p.label)}">${escapeHtml(p.label)}</button></li>`
    )
    .join("");
  return (
    `<aside id="sidebar"><h2>Classes</h2><ul>${classes}</ul>` +
    `<h2>Properties</h2><ul>${properties}</ul></aside>`
  );
}

export function renderForm(state: SessionState): string {
  const disabled = canSubmit(state) ? "" : " disabled";
  const busy = state.pending !== null ? `<span class="spinner">asking…</span>` : "";
  return (
    `<form id="ask-form">` +
    `<input id="question" type="text" autocomplete="off" placeholder="e.g. Which rivers are in the Emilia Romagna region?" value="${escapeHtml(
      state.draft
    )}" />` +
    `<button id="submit" type="submit"${disabled}>Ask</button>${busy}</form>`
  );
}

export function renderApp(state: SessionState): string {
  return (
    `<header><h1>geoask console</h1></header>` +
    renderErrorBanner(state) +
    `<main>` +
    renderSidebar(state.ontology, state.ontologyVisible) +
    `<div id="content">` +
    renderForm(state) +
    renderResultPanel(state) +
    renderHistory(state) +
    `</div></main>`
  );
}
