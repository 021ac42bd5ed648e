// DOM rendering for the workbench.
//
// renderWorkbench draws the whole screen from a UiSessionState snapshot.
// Buttons that drive the reasoning cycle carry a data-action attribute with
// one of the five operation names, and each is enabled only when the
// legality table allows that operation in the current phase.  Scores are
// written with String(score) so what the user reads is exactly what the
// service sent, never a reformatted copy.

import type { CaseBaseSummary, ResultView, SchemaDoc } from "./api.js";
import {
  collectValues,
  controlFor,
  describeRange,
  formatValue,
  isWeighted,
  queryAttributes,
} from "./forms.js";
import { canDo, type CycleAction, type UiSessionState } from "./state.js";

export interface Handlers {
  onSelectBase(id: string): void;
  onNewSession(): void;
  onFieldInput(name: string, value: string): void;
  onKInput(value: string): void;
  onSubmitQuery(): void;
  onPredict(): void;
  onChoose(caseId: string): void;
  onEditInput(name: string, value: string): void;
  onSaveRevision(): void;
  onRetainIdInput(value: string): void;
  onRetain(): void;
  onClose(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function actionButton(
  label: string,
  action: CycleAction,
  state: UiSessionState,
  extraDisabled = false,
): HTMLButtonElement {
  const button = el("button", "action");
  button.type = "button";
  button.dataset.action = action;
  button.textContent = label;
  button.disabled = state.pending || extraDisabled || !canDo(state.phase, action);
  return button;
}

function fieldRow(
  schema: SchemaDoc,
  idPrefix: string,
  name: string,
  rawValue: string,
  error: string | undefined,
  disabled: boolean,
  onInput: (name: string, value: string) => void,
): HTMLDivElement {
  const attr = schema.attributes.find((a) => a.name === name);
  if (!attr) {
    throw new Error(`unknown attribute ${name}`);
  }
  const row = el("div", "field");
  const label = el("label", undefined, attr.name);
  label.htmlFor = `${idPrefix}-${attr.name}`;
  row.appendChild(label);
  const control = controlFor(attr, rawValue);
  control.id = `${idPrefix}-${attr.name}`;
  control.disabled = disabled;
  control.addEventListener("input", () => onInput(attr.name, control.value));
  control.addEventListener("change", () => onInput(attr.name, control.value));
  row.appendChild(control);
  row.appendChild(el("span", "hint", describeRange(attr)));
  if (error) {
    control.setAttribute("aria-invalid", "true");
    row.appendChild(el("span", "field-error", error));
  }
  return row;
}

function renderTopbar(
  state: UiSessionState,
  bases: CaseBaseSummary[],
  handlers: Handlers,
): HTMLElement {
  const bar = el("header", "topbar");
  bar.appendChild(el("h1", undefined, "gradecase"));

  const baseLabel = el("label", "base-picker", "Case base ");
  const select = el("select");
  select.dataset.role = "base-select";
  for (const base of bases) {
    const option = el("option", undefined, `${base.id} (${base.caseCount} cases)`);
    option.value = base.id;
    select.appendChild(option);
  }
  if (state.caseBaseId) {
    select.value = state.caseBaseId;
  }
  select.disabled = state.pending || bases.length === 0;
  select.addEventListener("change", () => handlers.onSelectBase(select.value));
  baseLabel.appendChild(select);
  bar.appendChild(baseLabel);

  const info = el("span", "session-info");
  if (state.sessionId) {
    info.appendChild(el("span", "session-id", `Session ${state.sessionId}`));
  }
  const badge = el("span", "phase-badge", state.phase);
  badge.dataset.role = "phase";
  info.appendChild(badge);
  bar.appendChild(info);

  const fresh = el("button", "secondary", "New session");
  fresh.type = "button";
  fresh.dataset.role = "new-session";
  fresh.disabled = state.pending || state.caseBaseId === null;
  fresh.addEventListener("click", () => handlers.onNewSession());
  bar.appendChild(fresh);

  const close = actionButton("End session", "close", state);
  close.addEventListener("click", () => handlers.onClose());
  bar.appendChild(close);
  return bar;
}

function renderQueryPanel(
  state: UiSessionState,
  schema: SchemaDoc,
  handlers: Handlers,
): HTMLElement {
  const panel = el("section", "panel query-panel");
  panel.setAttribute("aria-label", "Query");
  panel.appendChild(el("h2", undefined, "Describe the student"));

  const form = el("form");
  form.dataset.role = "query-form";
  const attrs = queryAttributes(schema);
  const editable = canDo(state.phase, "query");
  for (const attr of attrs) {
    form.appendChild(
      fieldRow(
        schema,
        "query",
        attr.name,
        state.formValues[attr.name] ?? "",
        state.fieldErrors[attr.name],
        state.pending || !editable,
        handlers.onFieldInput,
      ),
    );
  }

  const kRow = el("div", "field");
  const kLabel = el("label", undefined, "neighbours (k)");
  kLabel.htmlFor = "query-k";
  kRow.appendChild(kLabel);
  const kInput = el("input");
  kInput.type = "number";
  kInput.id = "query-k";
  kInput.min = "1";
  kInput.step = "1";
  kInput.dataset.role = "k-input";
  kInput.value = state.kText;
  kInput.disabled = state.pending || !editable;
  kInput.addEventListener("input", () => handlers.onKInput(kInput.value));
  kRow.appendChild(kInput);
  kRow.appendChild(el("span", "hint", "blank for the service default"));
  form.appendChild(kRow);

  const { weightedCount } = collectValues(attrs, state.formValues);
  const buttons = el("div", "button-row");
  const submit = actionButton("Retrieve similar students", "query", state, weightedCount < 1);
  submit.type = "submit";
  buttons.appendChild(submit);

  const predict = el("button", "secondary", "Grade outlook");
  predict.type = "button";
  predict.dataset.role = "predict";
  predict.disabled = state.pending || state.caseBaseId === null || weightedCount < 1;
  predict.addEventListener("click", () => handlers.onPredict());
  buttons.appendChild(predict);
  form.appendChild(buttons);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    handlers.onSubmitQuery();
  });
  panel.appendChild(form);
  return panel;
}

function renderCaseValues(schema: SchemaDoc, values: Record<string, unknown>): HTMLElement {
  const list = el("dl", "kv");
  for (const attr of schema.attributes) {
    list.appendChild(el("dt", undefined, attr.name));
    list.appendChild(el("dd", undefined, formatValue(values[attr.name])));
  }
  return list;
}

function renderResultCard(
  schema: SchemaDoc,
  result: ResultView,
  state: UiSessionState,
  handlers: Handlers,
): HTMLElement {
  const card = el("article", "card result-card");
  card.dataset.caseId = result.caseId;
  const head = el("header");
  head.appendChild(el("span", "case-id", result.caseId));
  head.appendChild(el("span", "score", String(result.score)));
  card.appendChild(head);
  card.appendChild(renderCaseValues(schema, result.values));
  const choose = actionButton("Choose", "choose", state);
  choose.dataset.caseId = result.caseId;
  choose.addEventListener("click", () => handlers.onChoose(result.caseId));
  card.appendChild(choose);
  return card;
}

function renderResultsPanel(
  state: UiSessionState,
  schema: SchemaDoc,
  handlers: Handlers,
): HTMLElement | null {
  if (state.results === null) {
    return null;
  }
  const panel = el("section", "panel results-panel");
  panel.setAttribute("aria-label", "Retrieved cases");
  panel.appendChild(el("h2", undefined, `Similar students (${state.results.length})`));
  const strip = el("div", "card-strip");

  if (state.query) {
    const queryCard = el("article", "card query-card");
    const head = el("header");
    head.appendChild(el("span", "case-id", "your query"));
    queryCard.appendChild(head);
    const list = el("dl", "kv");
    for (const attr of schema.attributes) {
      if (attr.name in state.query) {
        list.appendChild(el("dt", undefined, attr.name));
        list.appendChild(el("dd", undefined, formatValue(state.query[attr.name])));
      }
    }
    queryCard.appendChild(list);
    strip.appendChild(queryCard);
  }

  for (const result of state.results) {
    strip.appendChild(renderResultCard(schema, result, state, handlers));
  }
  panel.appendChild(strip);
  return panel;
}

function renderRevisionPanel(
  state: UiSessionState,
  schema: SchemaDoc,
  handlers: Handlers,
): HTMLElement | null {
  if (
    state.workingCase === null ||
    (state.phase !== "Chosen" && state.phase !== "Revised" && state.phase !== "Retained")
  ) {
    return null;
  }
  const panel = el("section", "panel revision-panel");
  panel.setAttribute("aria-label", "Revision");
  panel.appendChild(el("h2", undefined, `Adapt case ${state.workingCase.id}`));

  const editable = canDo(state.phase, "revise");
  const form = el("form");
  form.dataset.role = "revision-form";
  for (const attr of schema.attributes) {
    form.appendChild(
      fieldRow(
        schema,
        "edit",
        attr.name,
        state.editValues[attr.name] ?? "",
        state.fieldErrors[attr.name],
        state.pending || !editable,
        handlers.onEditInput,
      ),
    );
  }
  const save = actionButton("Save revision", "revise", state);
  save.type = "submit";
  form.appendChild(save);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    handlers.onSaveRevision();
  });
  panel.appendChild(form);

  const retainForm = el("form");
  retainForm.dataset.role = "retain-form";
  const idLabel = el("label", undefined, "Store as ");
  idLabel.htmlFor = "retain-id";
  retainForm.appendChild(idLabel);
  const idInput = el("input");
  idInput.type = "text";
  idInput.id = "retain-id";
  idInput.name = "retainId";
  idInput.dataset.role = "retain-id";
  idInput.value = state.retainIdText;
  idInput.disabled = state.pending || !canDo(state.phase, "retain");
  idInput.addEventListener("input", () => handlers.onRetainIdInput(idInput.value));
  retainForm.appendChild(idInput);
  const retain = actionButton("Retain case", "retain", state);
  retain.type = "submit";
  retainForm.appendChild(retain);
  if (state.fieldErrors.__retainId) {
    retainForm.appendChild(el("span", "field-error", state.fieldErrors.__retainId));
  }
  retainForm.addEventListener("submit", (event) => {
    event.preventDefault();
    handlers.onRetain();
  });
  panel.appendChild(retainForm);

  if (state.phase === "Retained" && state.notice) {
    panel.appendChild(el("p", "notice retain-confirmation", state.notice));
  }
  return panel;
}

function renderOutlookPanel(state: UiSessionState): HTMLElement | null {
  if (state.outlook === null && state.outlookMessage === null) {
    return null;
  }
  const panel = el("section", "panel outlook-panel");
  panel.setAttribute("aria-label", "Grade outlook");
  panel.appendChild(el("h2", undefined, "Grade outlook"));
  if (state.outlook === null) {
    panel.appendChild(el("p", "empty-state", state.outlookMessage ?? ""));
    return panel;
  }
  const outlook = state.outlook;
  const suggestion = el("p", "suggestion");
  suggestion.append("Likely ", outlook.gradeAttribute, ": ");
  suggestion.appendChild(el("strong", undefined, outlook.suggestion));
  panel.appendChild(suggestion);

  const bars = el("div", "bars");
  for (const [grade, share] of Object.entries(outlook.proportions)) {
    const row = el("div", "bar-row");
    row.dataset.grade = grade;
    row.appendChild(el("span", "bar-label", grade));
    const track = el("div", "bar-track");
    const bar = el("div", "bar");
    bar.style.width = `${share * 100}%`;
    track.appendChild(bar);
    row.appendChild(track);
    row.appendChild(el("span", "bar-value", `${Math.round(share * 100)}%`));
    bars.appendChild(row);
  }
  panel.appendChild(bars);
  panel.appendChild(el("p", "hint-text", outlook.hint));
  panel.appendChild(el("pre", "feedback", outlook.feedback));
  return panel;
}

/** Draw the whole workbench for one state snapshot. */
export function renderWorkbench(
  state: UiSessionState,
  schema: SchemaDoc,
  handlers: Handlers,
  bases: CaseBaseSummary[] = [],
): HTMLElement {
  const root = el("div", "workbench");
  root.appendChild(renderTopbar(state, bases, handlers));
  if (state.error) {
    const alert = el("p", "error", state.error);
    alert.setAttribute("role", "alert");
    root.appendChild(alert);
  }
  if (state.notice && state.phase !== "Retained") {
    const status = el("p", "notice", state.notice);
    status.setAttribute("role", "status");
    root.appendChild(status);
  }
  const columns = el("div", "columns");
  columns.appendChild(renderQueryPanel(state, schema, handlers));
  const results = renderResultsPanel(state, schema, handlers);
  if (results) {
    columns.appendChild(results);
  }
  const revision = renderRevisionPanel(state, schema, handlers);
  if (revision) {
    columns.appendChild(revision);
  }
  const outlook = renderOutlookPanel(state);
  if (outlook) {
    columns.appendChild(outlook);
  }
  root.appendChild(columns);
  return root;
}
