/**
 * Typed client for the diagnosis session service.
 *
 * All session state lives server-side; this module only moves JSON and
 * never derives diagnostic facts on its own.
 */

export interface DpiDocument {
  components: string[];
  behaviors: Record<string, string>;
  sd_extra?: string[];
  obs?: string[];
  pos?: string[][];
  neg?: string[][];
  fault_probs?: Record<string, number>;
}

export interface SessionConfigBody {
  qsm?: "ent" | "spl";
  qcm?: "sum" | "max" | "card";
  tm?: number;
  enhance?: boolean;
  et?: ("atoms" | "defclause")[];
  leading?: number;
  max_queries?: number;
  seed?: number;
}

export interface DiagnosisView {
  id: string;
  components: string[];
  probability: number;
}

export interface PartitionView {
  dplus: string[];
  dminus: string[];
  dzero: string[];
}

export interface ScoresView {
  m_value: number;
  c_value: number;
  p_true: number;
  reasoner_calls: number;
  time_p1p2_ms: number;
  time_p3_ms: number;
}

export interface QueryView {
  sentences: string[];
  sentence_costs: Record<string, number>;
  components: string[] | null;
}

export interface PendingQueryView {
  query: QueryView;
  partition: PartitionView;
  scores: ScoresView;
}

export type SessionStatus = "querying" | "awaiting-answer" | "converged";

export interface SessionView {
  session_id: string;
  status: SessionStatus;
  converged: boolean;
  diagnoses: DiagnosisView[];
  pending: PendingQueryView | null;
  queries_asked: number;
  max_queries: number;
}

export interface HistoryEntryView {
  query: QueryView;
  partition: PartitionView;
  scores: ScoresView;
  answer: boolean;
  diagnoses_before: DiagnosisView[];
}

export interface HistoryView {
  session_id: string;
  entries: HistoryEntryView[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class SessionApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      let detail = `${response.status} ${response.statusText}`;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    if (response.status === 204) {
      return undefined as T;
    }
    return (await response.json()) as T;
  }

  createSession(dpi: DpiDocument, config: SessionConfigBody = {}): Promise<SessionView> {
    return this.request("/api/sessions", {
      method: "POST",
      body: JSON.stringify({ dpi, config }),
    });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request(`/api/sessions/${sessionId}`);
  }

  nextQuery(sessionId: string): Promise<SessionView> {
    return this.request(`/api/sessions/${sessionId}/next-query`, { method: "POST" });
  }

  answer(sessionId: string, verdict: boolean): Promise<SessionView> {
    return this.request(`/api/sessions/${sessionId}/answer`, {
      method: "POST",
      body: JSON.stringify({ answer: verdict }),
    });
  }

  history(sessionId: string): Promise<HistoryView> {
    return this.request(`/api/sessions/${sessionId}/history`);
  }

  deleteSession(sessionId: string): Promise<void> {
    return this.request(`/api/sessions/${sessionId}`, { method: "DELETE" });
  }
}
