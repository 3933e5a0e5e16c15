// Session state and its pure transitions. History is append-only within a
// session; one question is in flight at a time.

import { AskResponse, OntologyCatalog } from "./types";

export type Tab = "answers" | "sparql" | "trace";

export interface HistoryEntry {
  question: string;
  response: AskResponse;
}

export interface SessionState {
  history: HistoryEntry[];
  pending: string | null;
  current: AskResponse | null;
  error: string | null;
  tab: Tab;
  ontology: OntologyCatalog | null;
  ontologyVisible: boolean;
  draft: string;
}

export function initialState(): SessionState {
  return {
    history: [],
    pending: null,
    current: null,
    error: null,
    tab: "answers",
    ontology: null,
    ontologyVisible: false,
    draft: "",
  };
}

export function setDraft(state: SessionState, draft: string): SessionState {
  return { ...state, draft };
}

export function canSubmit(state: SessionState): boolean {
  return state.pending === null && state.draft.trim().length > 0;
}

export function submitStart(state: SessionState, question: string): SessionState {
  return { ...state, pending: question, error: null };
}

export function submitSuccess(state: SessionState, response: AskResponse): SessionState {
  return {
    ...state,
    pending: null,
    current: response,
    error: null,
    tab: "answers",
    history: [...state.history, { question: response.question, response }],
  };
}

export function submitFailure(state: SessionState, message: string): SessionState {
  // the failed question is not added to history; prior history stays intact
  return { ...state, pending: null, error: message };
}

export function selectTab(state: SessionState, tab: Tab): SessionState {
  return { ...state, tab };
}

export function ontologyLoaded(state: SessionState, catalog: OntologyCatalog): SessionState {
  return { ...state, ontology: catalog, ontologyVisible: true };
}

export function ontologyUnavailable(state: SessionState): SessionState {
  return { ...state, ontology: null, ontologyVisible: false };
}

export function insertIntoDraft(state: SessionState, text: string, cursor: number | null): SessionState {
  const draft = state.draft;
  const at = cursor === null || cursor < 0 || cursor > draft.length ? draft.length : cursor;
  const before = draft.slice(0, at);
  const after = draft.slice(at);
  const sep = before.length > 0 && !before.endsWith(" ") ? " " : "";
  return { ...state, draft: before + sep + text + after };
}
