// Application controller.
//
// Owns the UiSessionState, performs API calls, and re-renders after every
// response.  Nothing here is optimistic: the screen only changes when the
// service has confirmed a transition, and every control is gated through the
// legality table before a request is issued.

import {
  ApiRequestError,
  GradecaseApi,
  type AttributeValues,
  type CaseBaseSummary,
  type SchemaDoc,
} from "./api.js";
import { caseToFieldTexts, collectEdits, collectValues, queryAttributes } from "./forms.js";
import { renderWorkbench, type Handlers } from "./panels.js";
import { applySessionView, canDo, initialState, type UiSessionState } from "./state.js";

export class App {
  readonly api: GradecaseApi;
  readonly root: HTMLElement;
  state: UiSessionState;
  schema: SchemaDoc | null = null;
  bases: CaseBaseSummary[] = [];
  private readonly handlers: Handlers;

  constructor(root: HTMLElement, apiBase = "") {
    this.root = root;
    this.api = new GradecaseApi(apiBase);
    this.state = initialState();
    this.handlers = {
      onSelectBase: (id) => void this.selectBase(id),
      onNewSession: () => void this.newSession(),
      onFieldInput: (name, value) => this.fieldInput(name, value),
      onKInput: (value) => {
        this.state.kText = value;
      },
      onSubmitQuery: () => void this.submitQuery(),
      onPredict: () => void this.predict(),
      onChoose: (caseId) => void this.choose(caseId),
      onEditInput: (name, value) => {
        this.state.editValues[name] = value;
      },
      onSaveRevision: () => void this.saveRevision(),
      onRetainIdInput: (value) => {
        this.state.retainIdText = value;
      },
      onRetain: () => void this.retain(),
      onClose: () => void this.closeSession(),
    };
  }

  render(): void {
    if (this.schema === null) {
      const shell = document.createElement("div");
      shell.className = "workbench";
      const message = document.createElement("p");
      message.className = this.state.error ? "error" : "loading";
      message.textContent = this.state.error ?? "Loading…";
      shell.appendChild(message);
      this.root.replaceChildren(shell);
      return;
    }
    this.root.replaceChildren(renderWorkbench(this.state, this.schema, this.handlers, this.bases));
  }

  async mount(): Promise<void> {
    try {
      this.bases = await this.api.listCaseBases();
      const first = this.bases[0];
      if (first === undefined) {
        this.state.error = "No case bases available on the service.";
      } else {
        await this.loadBase(first.id);
      }
    } catch (err) {
      this.state.error = errorText(err);
    }
    this.render();
  }

  /** Switch to a case base: fetch its schema and ids, start a session. */
  private async loadBase(id: string): Promise<void> {
    const summary = this.bases.find((base) => base.id === id);
    if (summary === undefined) {
      throw new Error(`unknown case base ${id}`);
    }
    this.schema = await this.api.getSchema(summary.schemaId);
    const listing = await this.api.listCases(id);
    const fresh = initialState();
    fresh.caseBaseId = id;
    fresh.knownCaseIds = new Set(listing.cases.map((c) => c.id));
    this.state = fresh;
    applySessionView(this.state, await this.api.startSession(id));
  }

  /** Run one service call with the pending flag set and errors captured. */
  private async run(op: () => Promise<void>): Promise<void> {
    if (this.state.pending) {
      return;
    }
    this.state.pending = true;
    this.state.error = null;
    this.render();
    try {
      await op();
    } catch (err) {
      await this.handleError(err);
    } finally {
      this.state.pending = false;
      this.render();
    }
  }

  private async handleError(err: unknown): Promise<void> {
    if (err instanceof ApiRequestError) {
      if (err.status === 409 && this.state.sessionId) {
        // The view drifted from the service's state machine; resync.
        try {
          applySessionView(this.state, await this.api.getSession(this.state.sessionId));
        } catch {
          // Session already gone; leave the stale view disabled.
        }
      }
      if (Array.isArray(err.body.detail)) {
        this.state.error = `${err.body.message}: ${err.body.detail.join("; ")}`;
      } else {
        this.state.error = err.body.message;
      }
      return;
    }
    this.state.error = errorText(err);
  }

  private fieldInput(name: string, value: string): void {
    this.state.formValues[name] = value;
    this.refreshQueryButtons();
  }

  /** Patch the two query buttons in place so typing never drops focus. */
  private refreshQueryButtons(): void {
    if (this.schema === null) {
      return;
    }
    const { weightedCount } = collectValues(queryAttributes(this.schema), this.state.formValues);
    const submit = this.root.querySelector<HTMLButtonElement>('[data-action="query"]');
    if (submit) {
      submit.disabled =
        this.state.pending || !canDo(this.state.phase, "query") || weightedCount < 1;
    }
    const predict = this.root.querySelector<HTMLButtonElement>('[data-role="predict"]');
    if (predict) {
      predict.disabled =
        this.state.pending || this.state.caseBaseId === null || weightedCount < 1;
    }
  }

  private async selectBase(id: string): Promise<void> {
    if (id === this.state.caseBaseId) {
      return;
    }
    await this.run(async () => {
      await this.loadBase(id);
    });
  }

  private async newSession(): Promise<void> {
    const baseId = this.state.caseBaseId;
    if (baseId === null) {
      return;
    }
    await this.run(async () => {
      const view = await this.api.startSession(baseId);
      this.state.formValues = {};
      this.state.editValues = {};
      this.state.fieldErrors = {};
      this.state.notice = null;
      applySessionView(this.state, view);
    });
  }

  /** Validate the form client-side; only a clean form produces a request. */
  private collectQuery(): { values: AttributeValues; k?: number } | null {
    if (this.schema === null) {
      return null;
    }
    const attrs = queryAttributes(this.schema);
    const { values, problems, weightedCount } = collectValues(attrs, this.state.formValues);
    this.state.fieldErrors = problems;
    if (Object.keys(problems).length > 0) {
      this.state.error = "Fix the highlighted fields first.";
      this.render();
      return null;
    }
    if (weightedCount < 1) {
      this.state.error = "Enter at least one similarity-weighted attribute.";
      this.render();
      return null;
    }
    const kText = this.state.kText.trim();
    if (kText === "") {
      return { values };
    }
    const k = Number(kText);
    if (!Number.isInteger(k) || k < 1) {
      this.state.error = "The neighbour count must be a positive whole number.";
      this.render();
      return null;
    }
    return { values, k };
  }

  private async submitQuery(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null || !canDo(this.state.phase, "query")) {
      return;
    }
    const query = this.collectQuery();
    if (query === null) {
      return;
    }
    await this.run(async () => {
      const view = await this.api.submitQuery(sessionId, query.values, query.k);
      this.state.notice = null;
      applySessionView(this.state, view);
    });
  }

  private async predict(): Promise<void> {
    const baseId = this.state.caseBaseId;
    if (baseId === null) {
      return;
    }
    const query = this.collectQuery();
    if (query === null) {
      return;
    }
    await this.run(async () => {
      try {
        this.state.outlook = await this.api.predict(baseId, query.values, query.k);
        this.state.outlookMessage = null;
      } catch (err) {
        if (err instanceof ApiRequestError && err.status === 422) {
          this.state.outlook = null;
          this.state.outlookMessage = err.body.message;
          return;
        }
        throw err;
      }
    });
  }

  private async choose(caseId: string): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null || !canDo(this.state.phase, "choose")) {
      return;
    }
    await this.run(async () => {
      const view = await this.api.choose(sessionId, caseId);
      applySessionView(this.state, view);
      if (this.schema && view.workingCase) {
        this.state.editValues = caseToFieldTexts(this.schema, view.workingCase.values);
      }
      this.state.fieldErrors = {};
      this.state.notice = null;
    });
  }

  private async saveRevision(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null || this.schema === null || !canDo(this.state.phase, "revise")) {
      return;
    }
    const { edits, problems } = collectEdits(this.schema, this.state.editValues);
    this.state.fieldErrors = problems;
    if (Object.keys(problems).length > 0) {
      this.state.error = "Fix the highlighted fields first.";
      this.render();
      return;
    }
    await this.run(async () => {
      const view = await this.api.revise(sessionId, edits);
      applySessionView(this.state, view);
      if (this.schema && view.workingCase) {
        this.state.editValues = caseToFieldTexts(this.schema, view.workingCase.values);
      }
      this.state.notice = "Revision saved.";
    });
  }

  private async retain(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null || !canDo(this.state.phase, "retain")) {
      return;
    }
    const newId = this.state.retainIdText.trim();
    if (newId === "") {
      this.state.fieldErrors = { ...this.state.fieldErrors, __retainId: "Enter an id to store the case under." };
      this.render();
      return;
    }
    await this.run(async () => {
      const replacing = this.state.knownCaseIds.has(newId);
      const view = await this.api.retain(sessionId, newId);
      applySessionView(this.state, view);
      delete this.state.fieldErrors.__retainId;
      this.state.notice = replacing
        ? `Stored as ${newId}, replacing the existing case.`
        : `Stored as ${newId}, added as a new case.`;
      this.state.knownCaseIds.add(newId);
    });
  }

  private async closeSession(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null || !canDo(this.state.phase, "close")) {
      return;
    }
    await this.run(async () => {
      await this.api.closeSession(sessionId);
      this.state.phase = "Closed";
      this.state.notice = "Session closed.";
    });
  }
}

function errorText(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}

/**
 * Mount the workbench into a container.  The API base defaults to the
 * page's own origin; set window.GRADECASE_API to point somewhere else.
 */
export async function mountApp(root: HTMLElement, apiBase?: string): Promise<App> {
  const override = (globalThis as { GRADECASE_API?: string }).GRADECASE_API;
  const app = new App(root, apiBase ?? override ?? "");
  await app.mount();
  return app;
}
