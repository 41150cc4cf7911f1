import type {
  AmalgamatedDoc,
  EvaluateResponse,
  ExportDoc,
  OrdinationDoc,
  OrdinationMode,
  SessionSummary,
  StateDoc,
  TernaryDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
  }
}

export interface CandidateSide {
  num: string | string[];
  den: string | string[];
}

/** Thin typed client over the session service. Every mutation returns the
 * authoritative new state; the UI re-renders from that, never optimistically. */
export class WorkbenchApi {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(
    method: string,
    path: string,
    body?: BodyInit,
    contentType = "application/json",
  ): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      body,
      headers: body === undefined ? undefined : { "Content-Type": contentType },
    });
    const payload = await response.json().catch(() => null);
    if (!response.ok) {
      throw new ApiError(response.status, payload?.detail ?? payload);
    }
    return payload as T;
  }

  createSession(csv: string, closure = 100): Promise<SessionSummary> {
    return this.request("POST", `/sessions?closure=${closure}`, csv, "text/csv");
  }

  state(id: string): Promise<StateDoc> {
    return this.request("GET", `/sessions/${id}`);
  }

  evaluate(id: string, candidates: CandidateSide[]): Promise<EvaluateResponse> {
    return this.request("POST", `/sessions/${id}/evaluate`, JSON.stringify({ candidates }));
  }

  split(
    id: string,
    parent: string | null,
    children: { name: string; parts: string[] }[],
  ): Promise<StateDoc> {
    return this.request("POST", `/sessions/${id}/split`, JSON.stringify({ parent, children }));
  }

  commit(id: string, num: string, den: string, manual: boolean): Promise<StateDoc> {
    return this.request("POST", `/sessions/${id}/commit`, JSON.stringify({ num, den, manual }));
  }

  undo(id: string): Promise<StateDoc> {
    return this.request("POST", `/sessions/${id}/undo`);
  }

  redo(id: string): Promise<StateDoc> {
    return this.request("POST", `/sessions/${id}/redo`);
  }

  importHierarchy(id: string, doc: unknown): Promise<StateDoc> {
    return this.request("POST", `/sessions/${id}/hierarchy`, JSON.stringify(doc));
  }

  ordination(id: string, mode: OrdinationMode, target = "parts"): Promise<OrdinationDoc> {
    return this.request("GET", `/sessions/${id}/ordination?mode=${mode}&target=${target}`);
  }

  ternary(id: string): Promise<TernaryDoc> {
    return this.request("GET", `/sessions/${id}/ordination?mode=ternary`);
  }

  amalgamated(id: string): Promise<AmalgamatedDoc> {
    return this.request("GET", `/sessions/${id}/amalgamated`);
  }

  exportSession(id: string): Promise<ExportDoc> {
    return this.request("GET", `/sessions/${id}/export`);
  }
}
