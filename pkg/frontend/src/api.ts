// Typed client for the two service endpoints.  Every call resolves to a
// discriminated outcome; network failures never throw past this module.

export interface SubstitutionPair {
  wildcard: string;
  latex: string;
}

export interface RenamingPair {
  from: string;
  to: string;
}

export interface FormulaHit {
  formula_id: number;
  path: number[];
  score: string; // exact rational, e.g. "9/29"
  latex: string; // matched subterm
  formula_latex: string; // whole formula as written in the corpus
  substitution: SubstitutionPair[];
  renaming?: RenamingPair[];
}

export interface DocResult {
  doc_id: string;
  title: string;
  text_score?: number;
  snippet: string;
  formula_hits: FormulaHit[];
}

export interface SearchResponse {
  results: DocResult[];
  total: number;
  timings: { text_ms: number; math_ms: number };
}

export interface ParseErrorInfo {
  position: number; // byte offset into the UTF-8 source
  kind: string;
  message: string;
}

export interface SearchRequest {
  text?: string;
  math?: string;
  alpha?: boolean;
  limit?: number;
}

export type SearchOutcome =
  | { kind: "ok"; body: SearchResponse }
  | { kind: "parse-error"; error: ParseErrorInfo }
  | { kind: "bad-request"; message: string }
  | { kind: "network"; message: string };

export type RenderOutcome =
  | { kind: "ok"; canonicalLatex: string }
  | { kind: "parse-error"; error: ParseErrorInfo }
  | { kind: "network"; message: string };

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function postJson(
  fetchFn: FetchLike,
  url: string,
  payload: unknown,
): Promise<{ status: number; body: unknown } | { networkError: string }> {
  try {
    const response = await fetchFn(url, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    return { status: response.status, body: await response.json() };
  } catch (err) {
    return { networkError: err instanceof Error ? err.message : String(err) };
  }
}

export async function postSearch(
  request: SearchRequest,
  fetchFn: FetchLike = fetch,
): Promise<SearchOutcome> {
  const reply = await postJson(fetchFn, "/api/search", request);
  if ("networkError" in reply) {
    return { kind: "network", message: reply.networkError };
  }
  const body = reply.body as Record<string, unknown>;
  if (reply.status === 200) {
    return { kind: "ok", body: reply.body as SearchResponse };
  }
  if (reply.status === 422) {
    return { kind: "parse-error", error: body.error as ParseErrorInfo };
  }
  return { kind: "bad-request", message: String(body.error ?? reply.status) };
}

export async function postRender(
  latex: string,
  asQuery: boolean,
  fetchFn: FetchLike = fetch,
): Promise<RenderOutcome> {
  const payload: Record<string, unknown> = { latex };
  if (asQuery) {
    payload.query = 1;
  }
  const reply = await postJson(fetchFn, "/api/render", payload);
  if ("networkError" in reply) {
    return { kind: "network", message: reply.networkError };
  }
  const body = reply.body as Record<string, unknown>;
  if (reply.status === 200 && body.ok === true) {
    return { kind: "ok", canonicalLatex: String(body.canonical_latex ?? "") };
  }
  if (reply.status === 422) {
    return { kind: "parse-error", error: body.error as ParseErrorInfo };
  }
  return { kind: "network", message: `unexpected status ${reply.status}` };
}
