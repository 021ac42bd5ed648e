// Client-side session state and the action legality table.
//
// The table mirrors the service's state machine exactly.  The UI consults it
// before enabling any control, so a request that the service would reject as
// an illegal transition is never sent in the first place.

import type { CaseView, ResultView, SessionPhase, SessionView } from "./api.js";

/** Session phases as the UI sees them; NoSession means nothing started yet. */
export type Phase = "NoSession" | SessionPhase;

/** The five operations a session can perform. */
export type CycleAction = "query" | "choose" | "revise" | "retain" | "close";

export const ALL_ACTIONS: readonly CycleAction[] = [
  "query",
  "choose",
  "revise",
  "retain",
  "close",
];

/** Which actions each phase permits, matching the service's transitions. */
export const LEGAL_ACTIONS: Record<Phase, readonly CycleAction[]> = {
  NoSession: [],
  Created: ["query", "close"],
  Retrieved: ["query", "choose", "close"],
  Chosen: ["revise", "retain", "close"],
  Revised: ["revise", "retain", "close"],
  Retained: ["close"],
  Closed: [],
};

export function canDo(phase: Phase, action: CycleAction): boolean {
  return LEGAL_ACTIONS[phase].includes(action);
}

/** Everything the workbench needs to draw itself. */
export interface UiSessionState {
  caseBaseId: string | null;
  sessionId: string | null;
  phase: Phase;
  /** Raw text per query field; empty string means the attribute is left out. */
  formValues: Record<string, string>;
  /** Raw text of the neighbour-count box; empty means service default. */
  kText: string;
  /** Client-side validation problems keyed by attribute name. */
  fieldErrors: Record<string, string>;
  results: ResultView[] | null;
  query: Record<string, unknown> | null;
  workingCase: CaseView | null;
  /** Raw text per revision field, seeded from the working case. */
  editValues: Record<string, string>;
  retainIdText: string;
  retainedId: string | null;
  /** Ids present in the case base, used to phrase the retain confirmation. */
  knownCaseIds: Set<string>;
  outlook: import("./api.js").OutlookView | null;
  outlookMessage: string | null;
  pending: boolean;
  error: string | null;
  notice: string | null;
}

export function initialState(): UiSessionState {
  return {
    caseBaseId: null,
    sessionId: null,
    phase: "NoSession",
    formValues: {},
    kText: "",
    fieldErrors: {},
    results: null,
    query: null,
    workingCase: null,
    editValues: {},
    retainIdText: "",
    retainedId: null,
    knownCaseIds: new Set(),
    outlook: null,
    outlookMessage: null,
    pending: false,
    error: null,
    notice: null,
  };
}

/** Fold a fresh session document from the service into the UI state. */
export function applySessionView(state: UiSessionState, view: SessionView): void {
  state.sessionId = view.id;
  state.caseBaseId = view.caseBaseId;
  state.phase = view.state;
  state.query = view.query;
  state.results = view.results;
  state.retainedId = view.retainedId;
  const previousId = state.workingCase ? state.workingCase.id : null;
  state.workingCase = view.workingCase;
  if (view.workingCase && view.workingCase.id !== previousId) {
    state.retainIdText = view.workingCase.id;
  }
}
