// Wire types for the question-answering HTTP API (see ../docs/api.md).

export interface TermJson {
  type: "uri" | "literal";
  value: string;
  datatype?: string;
  "xml:lang"?: string;
}

export interface ResultRows {
  vars: string[];
  rows: Record<string, TermJson>[];
}

export type ResultSetJson = ResultRows | { boolean: boolean };

export interface AskResponse {
  question: string;
  sparql: string;
  rewrittenSparql: string;
  answers: ResultSetJson | null;
  returnTypes: string[];
  trace: unknown;
  timings: Record<string, number>;
}

export interface OntologyClass {
  iri: string;
  label: string;
  synonyms: string[];
  parent: string | null;
  features: number;
}

export interface OntologyProperty {
  iri: string;
  label: string;
  synonyms: string[];
  domain: string;
  range: string | null;
}

export interface OntologyCatalog {
  classes: OntologyClass[];
  properties: OntologyProperty[];
}

export function isBoolean(rs: ResultSetJson): rs is { boolean: boolean } {
  return (rs as { boolean?: boolean }).boolean !== undefined;
}
