// Thin client for the question-answering service. All calls are idempotent
// reads/asks; the UI never mutates server state.

import { AskResponse, OntologyCatalog } from "./types";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(message: string, public readonly status: number | null) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init)
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async ask(question: string): Promise<AskResponse> {
    let response: Response;
    try {
      response = await this.fetchFn(this.url("/ask"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ question }),
      });
    } catch (err) {
      throw new ApiError(`Service unreachable: ${String(err)}`, null);
    }
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const detail = body && typeof body.error === "string" ? body.error : response.statusText;
      throw new ApiError(detail, response.status);
    }
    return body as AskResponse;
  }

  async ontology(): Promise<OntologyCatalog> {
    let response: Response;
    try {
      response = await this.fetchFn(this.url("/ontology"));
    } catch (err) {
      throw new ApiError(`Service unreachable: ${String(err)}`, null);
    }
    if (!response.ok) {
      throw new ApiError(response.statusText, response.status);
    }
    return (await response.json()) as OntologyCatalog;
  }
}
