// Typed fetch client for the gradecase HTTP service.
//
// This module is the only place that talks to the network.  Everything the
// rest of the UI knows about the service comes through the types below, which
// mirror the JSON documents the service produces verbatim.

export type AttributeKind = "numeric" | "grade" | "boolean" | "categorical" | "text";

export type AttributeGroup = "description" | "solution" | "result" | "justification";

export interface AttributeDoc {
  name: string;
  type: AttributeKind;
  weight: number;
  group: AttributeGroup;
  min?: number;
  max?: number;
  scale?: string[];
  allowed?: string[];
}

export interface SchemaDoc {
  id: string;
  attributes: AttributeDoc[];
}

export interface CaseBaseSummary {
  id: string;
  schemaId: string;
  caseCount: number;
}

/** Attribute values as they appear on the wire: absent keys mean "unknown". */
export type AttributeValues = Record<string, unknown>;

export interface CaseView {
  id: string;
  values: AttributeValues;
}

export interface ResultView {
  caseId: string;
  score: number;
  values: AttributeValues;
}

export type SessionPhase =
  | "Created"
  | "Retrieved"
  | "Chosen"
  | "Revised"
  | "Retained"
  | "Closed";

export interface SessionView {
  id: string;
  caseBaseId: string;
  state: SessionPhase;
  query: AttributeValues | null;
  results: ResultView[] | null;
  workingCase: CaseView | null;
  retainedId: string | null;
}

export interface NeighborView {
  caseId: string;
  score: number;
  grade: string;
}

export interface OutlookView {
  gradeAttribute: string;
  counts: Record<string, number>;
  proportions: Record<string, number>;
  suggestion: string;
  hint: string;
  neighbors: NeighborView[];
  feedback: string;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail?: unknown;
}

/** Raised for any non-2xx response, carrying the service's error document. */
export class ApiRequestError extends Error {
  readonly status: number;
  readonly body: ApiErrorBody;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.name = "ApiRequestError";
    this.status = status;
    this.body = body;
  }

  get code(): string {
    return this.body.code;
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(base + path, init);
  if (!response.ok) {
    let body: ApiErrorBody;
    try {
      body = (await response.json()) as ApiErrorBody;
    } catch {
      body = { code: "io_error", message: `HTTP ${response.status}` };
    }
    throw new ApiRequestError(response.status, body);
  }
  return (await response.json()) as T;
}

function jsonPost(payload: unknown): RequestInit {
  return {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(payload),
  };
}

export class GradecaseApi {
  /** Base URL without a trailing slash; empty string means same origin. */
  readonly base: string;

  constructor(base = "") {
    this.base = base.replace(/\/+$/, "");
  }

  health(): Promise<{ status: string }> {
    return request(this.base, "/health");
  }

  listCaseBases(): Promise<CaseBaseSummary[]> {
    return request(this.base, "/casebases");
  }

  getCaseBase(id: string): Promise<CaseBaseSummary> {
    return request(this.base, `/casebases/${encodeURIComponent(id)}`);
  }

  getSchema(id: string): Promise<SchemaDoc> {
    return request(this.base, `/schemas/${encodeURIComponent(id)}`);
  }

  listCases(baseId: string): Promise<{ cases: CaseView[] }> {
    return request(this.base, `/casebases/${encodeURIComponent(baseId)}/cases`);
  }

  predict(baseId: string, values: AttributeValues, k?: number): Promise<OutlookView> {
    const payload: Record<string, unknown> = { values };
    if (k !== undefined) {
      payload.k = k;
    }
    return request(this.base, `/casebases/${encodeURIComponent(baseId)}/predict`, jsonPost(payload));
  }

  startSession(caseBaseId: string): Promise<SessionView> {
    return request(this.base, "/sessions", jsonPost({ caseBaseId }));
  }

  getSession(id: string): Promise<SessionView> {
    return request(this.base, `/sessions/${encodeURIComponent(id)}`);
  }

  submitQuery(id: string, values: AttributeValues, k?: number): Promise<SessionView> {
    const payload: Record<string, unknown> = { values };
    if (k !== undefined) {
      payload.k = k;
    }
    return request(this.base, `/sessions/${encodeURIComponent(id)}/query`, jsonPost(payload));
  }

  choose(id: string, caseId: string): Promise<SessionView> {
    return request(this.base, `/sessions/${encodeURIComponent(id)}/choose`, jsonPost({ caseId }));
  }

  revise(id: string, edits: AttributeValues): Promise<SessionView> {
    return request(this.base, `/sessions/${encodeURIComponent(id)}/revise`, jsonPost({ edits }));
  }

  retain(id: string, newId: string): Promise<SessionView> {
    return request(this.base, `/sessions/${encodeURIComponent(id)}/retain`, jsonPost({ newId }));
  }

  closeSession(id: string): Promise<{ id: string; state: string }> {
    return request(this.base, `/sessions/${encodeURIComponent(id)}`, { method: "DELETE" });
  }
}
