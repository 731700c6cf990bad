/**
 * Session store driving the console.
 *
 * The flow after an answer is post -> refetch -> auto-request the next
 * query; every mutation goes through the documented endpoints and the
 * store never recomputes diagnostic facts client-side.  Service errors are
 * surfaced without dropping the last good view; stale-query conflicts
 * (409) trigger a state refetch instead of failing.
 */

import {
  ApiError,
  DpiDocument,
  HistoryEntryView,
  SessionApi,
  SessionConfigBody,
  SessionView,
} from "./api.js";

export interface ConsoleState {
  view: SessionView | null;
  history: HistoryEntryView[];
  error: string | null;
  busy: boolean;
  pretty: boolean;
}

export type Listener = (state: ConsoleState) => void;

export class SessionController {
  private state: ConsoleState = {
    view: null,
    history: [],
    error: null,
    busy: false,
    pretty: false,
  };

  constructor(
    private readonly api: SessionApi,
    private readonly listener: Listener,
  ) {}

  snapshot(): ConsoleState {
    return { ...this.state, history: [...this.state.history] };
  }

  private emit(update: Partial<ConsoleState>): void {
    this.state = { ...this.state, ...update };
    this.listener(this.snapshot());
  }

  togglePretty(): void {
    this.emit({ pretty: !this.state.pretty });
  }

  async start(dpi: DpiDocument, config: SessionConfigBody): Promise<void> {
    this.emit({ busy: true, error: null, view: null, history: [] });
    try {
      let view = await this.api.createSession(dpi, config);
      if (view.status === "querying") {
        view = await this.api.nextQuery(view.session_id);
      }
      this.emit({ view, busy: false });
    } catch (error) {
      this.emit({ busy: false, error: describe(error) });
    }
  }

  /** Post the verdict for the pending query, then advance automatically. */
  async answer(verdict: boolean): Promise<void> {
    const view = this.state.view;
    if (!view || view.status !== "awaiting-answer") {
      return;
    }
    this.emit({ busy: true, error: null });
    try {
      let updated = await this.api.answer(view.session_id, verdict);
      updated = await this.autoAdvance(updated);
      const history = await this.api.history(view.session_id);
      this.emit({ view: updated, history: history.entries, busy: false });
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        await this.refresh(describe(error));
        return;
      }
      this.emit({ busy: false, error: describe(error) });
    }
  }

  private async autoAdvance(view: SessionView): Promise<SessionView> {
    if (view.status === "querying" && view.queries_asked < view.max_queries) {
      return this.api.nextQuery(view.session_id);
    }
    return view;
  }

  /** Re-sync with the service, keeping the last view on failure. */
  async refresh(conflict: string | null = null): Promise<void> {
    const view = this.state.view;
    if (!view) {
      return;
    }
    try {
      let fresh = await this.api.getSession(view.session_id);
      fresh = await this.autoAdvance(fresh);
      const history = await this.api.history(view.session_id);
      this.emit({ view: fresh, history: history.entries, busy: false, error: conflict });
    } catch (error) {
      this.emit({ busy: false, error: describe(error) });
    }
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) {
    return error.message;
  }
  return error instanceof Error ? `service unreachable: ${error.message}` : String(error);
}
