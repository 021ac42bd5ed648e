// Shared plumbing for the test suite: talking to the live service spawned by
// the global setup, filling rendered controls, and polling for UI updates.

import type { CaseView } from "../src/api.js";

/** The scenario query as raw form field texts. */
export const SCENARIO: Record<string, string> = {
  gpa: "3.4",
  gradeDigitalSystems: "A",
  gradeBasicProgramming: "A",
  skillAssembly: "yes",
  skillProgramming: "yes",
  skillInstrumentDesign: "no",
  quiz1: "40",
  midExam: "45",
};

export const SAMPLE_BASE = "microprocessor_students";

export function serviceUrl(): string {
  const url = process.env.GRADECASE_URL;
  if (!url) {
    throw new Error("GRADECASE_URL is not set; the global setup did not run");
  }
  return url;
}

export async function fetchJson<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(serviceUrl() + path, init);
  if (!response.ok) {
    throw new Error(`${path} failed with HTTP ${response.status}: ${await response.text()}`);
  }
  return (await response.json()) as T;
}

/**
 * Clone the sample base under a new id on the service, optionally reshaping
 * the cases first.  Flow tests retain into their own copies so no test can
 * disturb another's expected neighbourhoods.
 */
export async function uploadBaseCopy(
  newId: string,
  mutate?: (cases: CaseView[]) => CaseView[],
): Promise<void> {
  const listing = await fetchJson<{ cases: CaseView[] }>(`/casebases/${SAMPLE_BASE}/cases`);
  const cases = mutate ? mutate(listing.cases) : listing.cases;
  const document = { schemaId: "student", cases };
  const response = await fetch(`${serviceUrl()}/casebases?id=${newId}`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(document),
  });
  if (!response.ok) {
    throw new Error(`uploading ${newId} failed with HTTP ${response.status}: ${await response.text()}`);
  }
}

/** Poll until fn returns something truthy, or fail with the given label. */
export async function until<T>(
  fn: () => T | null | undefined | false,
  label: string,
  timeoutMs = 15000,
): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const value = fn();
    if (value) {
      return value;
    }
    if (Date.now() > deadline) {
      throw new Error(`timed out waiting for ${label}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
}

/** Set a named control's value and fire the events the UI listens for. */
export function setField(scope: ParentNode, name: string, value: string): void {
  const control = scope.querySelector<HTMLInputElement | HTMLSelectElement>(`[name="${name}"]`);
  if (!control) {
    throw new Error(`no control named ${name}`);
  }
  control.value = value;
  control.dispatchEvent(new Event("input", { bubbles: true }));
  control.dispatchEvent(new Event("change", { bubbles: true }));
}

/** Submit a form the way a browser would, without a real click. */
export function submitForm(scope: ParentNode, role: string): void {
  const form = scope.querySelector<HTMLFormElement>(`[data-role="${role}"]`);
  if (!form) {
    throw new Error(`no form with role ${role}`);
  }
  form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}

/** A fresh container attached to the document for mounting the app. */
export function freshRoot(): HTMLElement {
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.appendChild(root);
  return root;
}
