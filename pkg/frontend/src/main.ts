// DOM wiring: one state value, full re-render on every transition, events by
// delegation so re-rendering never loses handlers.

import { ApiClient, ApiError } from "./api";
import { renderApp } from "./render";
import {
  SessionState,
  Tab,
  canSubmit,
  initialState,
  insertIntoDraft,
  ontologyLoaded,
  ontologyUnavailable,
  selectTab,
  setDraft,
  submitFailure,
  submitStart,
  submitSuccess,
} from "./state";

const params = new URLSearchParams(window.location.search);
const API_BASE = params.get("api") ?? "http://127.0.0.1:8000";

const client = new ApiClient(API_BASE);
let state: SessionState = initialState();
const root = document.getElementById("app") as HTMLElement;

function render() {
  const active = document.activeElement as HTMLInputElement | null;
  const cursor = active && active.id === "question" ? active.selectionStart : null;
  root.innerHTML = renderApp(state);
  const input = document.getElementById("question") as HTMLInputElement | null;
  if (input) {
    input.focus();
    if (cursor !== null) {
      const at = Math.min(cursor, input.value.length);
      input.setSelectionRange(at, at);
    }
  }
}

function update(next: SessionState) {
  state = next;
  render();
}

async function submit(question: string) {
  if (!canSubmit(state)) {
    return;
  }
  update(submitStart(state, question));
  try {
    const response = await client.ask(question);
    update(setDraft(submitSuccess(state, response), ""));
  } catch (err) {
    const message = err instanceof ApiError ? err.message : String(err);
    update(submitFailure(state, message));
  }
}

document.addEventListener("submit", (event) => {
  const form = event.target as HTMLElement;
  if (form.id === "ask-form") {
    event.preventDefault();
    const input = document.getElementById("question") as HTMLInputElement;
    void submit(input.value);
  }
});

document.addEventListener("input", (event) => {
  const input = event.target as HTMLInputElement;
  if (input.id === "question") {
    // keep state in sync without re-rendering on every keystroke
    state = setDraft(state, input.value);
    const button = document.getElementById("submit") as HTMLButtonElement | null;
    if (button) {
      button.disabled = !canSubmit(state);
    }
  }
});

document.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  const tab = target.getAttribute("data-tab");
  if (tab) {
    update(selectTab(state, tab as Tab));
    return;
  }
  const insert = target.getAttribute("data-insert");
  if (insert) {
    const input = document.getElementById("question") as HTMLInputElement | null;
    update(insertIntoDraft(state, insert, input ? input.selectionStart : null));
    return;
  }
  const history = target.getAttribute("data-history");
  if (history) {
    const entry = state.history[Number(history)];
    if (entry) {
      update(setDraft(state, entry.question));
    }
  }
});

async function boot() {
  render();
  try {
    update(ontologyLoaded(state, await client.ontology()));
  } catch {
    update(ontologyUnavailable(state));
  }
}

void boot();
