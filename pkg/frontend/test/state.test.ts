import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";

import {
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
} from "../src/state";
import { AskResponse, OntologyCatalog } from "../src/types";

const response = JSON.parse(
  readFileSync(new URL("./fixtures/running_example.json", import.meta.url), "utf-8")
) as AskResponse;
const catalog = JSON.parse(
  readFileSync(new URL("./fixtures/ontology.json", import.meta.url), "utf-8")
) as OntologyCatalog;

describe("session state", () => {
  it("starts empty with submit disabled", () => {
    const s = initialState();
    expect(s.history).toEqual([]);
    expect(canSubmit(s)).toBe(false);
  });

  it("enables submit only for non-blank drafts when idle", () => {
    let s = setDraft(initialState(), "  ");
    expect(canSubmit(s)).toBe(false);
    s = setDraft(s, "Which rivers are in Attica?");
    expect(canSubmit(s)).toBe(true);
    s = submitStart(s, s.draft);
    expect(canSubmit(s)).toBe(false); // one in-flight question at a time
  });

  it("appends history on success and never rewrites it", () => {
    let s = setDraft(initialState(), response.question);
    s = submitStart(s, response.question);
    s = submitSuccess(s, response);
    expect(s.history).toHaveLength(1);
    expect(s.pending).toBeNull();
    const firstEntry = s.history[0];
    s = submitStart(setDraft(s, "again"), "again");
    s = submitSuccess(s, response);
    expect(s.history).toHaveLength(2);
    expect(s.history[0]).toBe(firstEntry); // append-only
  });

  it("keeps history intact on failure", () => {
    let s = submitSuccess(submitStart(setDraft(initialState(), "q"), "q"), response);
    const history = s.history;
    s = submitFailure(submitStart(setDraft(s, "next"), "next"), "Service unreachable");
    expect(s.error).toBe("Service unreachable");
    expect(s.history).toBe(history);
    expect(s.pending).toBeNull();
  });

  it("switches tabs without touching results", () => {
    let s = submitSuccess(submitStart(setDraft(initialState(), "q"), "q"), response);
    s = selectTab(s, "sparql");
    expect(s.tab).toBe("sparql");
    expect(s.current).toBe(response);
  });

  it("tracks ontology availability", () => {
    let s = ontologyLoaded(initialState(), catalog);
    expect(s.ontologyVisible).toBe(true);
    s = ontologyUnavailable(s);
    expect(s.ontologyVisible).toBe(false);
  });

  it("inserts synonyms at the cursor with spacing", () => {
    let s = setDraft(initialState(), "Show me");
    s = insertIntoDraft(s, "images", null);
    expect(s.draft).toBe("Show me images");
    s = setDraft(initialState(), "How many  are in Attica?");
    s = insertIntoDraft(s, "rivers", 9);
    expect(s.draft).toBe("How many rivers are in Attica?");
  });
});
