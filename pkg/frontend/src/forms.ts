// Schema-driven form controls and value parsing.
//
// Each attribute type gets the control that suits it: a number box with the
// schema's bounds, a select listing the grade scale or the allowed labels, a
// yes/no select for booleans, a plain text box otherwise.  A blank control
// means the attribute is simply left out of the query, never sent as null.

import type { AttributeDoc, AttributeValues, SchemaDoc } from "./api.js";

/** Attributes that belong on the query form: the problem description side. */
export function queryAttributes(schema: SchemaDoc): AttributeDoc[] {
  return schema.attributes.filter((attr) => attr.group === "description");
}

export function isWeighted(attr: AttributeDoc): boolean {
  return attr.weight > 0;
}

export function findAttribute(schema: SchemaDoc, name: string): AttributeDoc | undefined {
  return schema.attributes.find((attr) => attr.name === name);
}

/** Short human description of what a field accepts, shown next to the label. */
export function describeRange(attr: AttributeDoc): string {
  switch (attr.type) {
    case "numeric":
      return `${attr.min} to ${attr.max}`;
    case "grade":
      return (attr.scale ?? []).join(" < ");
    case "boolean":
      return "yes or no";
    case "categorical":
      return (attr.allowed ?? []).join(", ");
    default:
      return "free text";
  }
}

function selectControl(name: string, options: string[], value: string): HTMLSelectElement {
  const select = document.createElement("select");
  select.name = name;
  const blank = document.createElement("option");
  blank.value = "";
  blank.textContent = "(leave out)";
  select.appendChild(blank);
  for (const option of options) {
    const node = document.createElement("option");
    node.value = option;
    node.textContent = option;
    select.appendChild(node);
  }
  select.value = value;
  return select;
}

/** Build the input element for one attribute, pre-filled with raw text. */
export function controlFor(attr: AttributeDoc, value: string): HTMLInputElement | HTMLSelectElement {
  switch (attr.type) {
    case "numeric": {
      const input = document.createElement("input");
      input.type = "number";
      input.name = attr.name;
      input.step = "any";
      if (attr.min !== undefined) {
        input.min = String(attr.min);
      }
      if (attr.max !== undefined) {
        input.max = String(attr.max);
      }
      input.value = value;
      return input;
    }
    case "grade":
      return selectControl(attr.name, attr.scale ?? [], value);
    case "boolean":
      return selectControl(attr.name, ["yes", "no"], value);
    case "categorical":
      return selectControl(attr.name, attr.allowed ?? [], value);
    default: {
      const input = document.createElement("input");
      input.type = "text";
      input.name = attr.name;
      input.value = value;
      return input;
    }
  }
}

export interface ParsedField {
  /** Parsed value, absent when the field was blank. */
  value?: unknown;
  /** Validation problem, absent when the text was acceptable. */
  problem?: string;
}

/** Turn one field's raw text into a wire value, or a problem message. */
export function parseField(attr: AttributeDoc, text: string): ParsedField {
  const trimmed = text.trim();
  if (trimmed === "") {
    return {};
  }
  switch (attr.type) {
    case "numeric": {
      const value = Number(trimmed);
      if (!Number.isFinite(value)) {
        return { problem: "must be a number" };
      }
      if (attr.min !== undefined && attr.max !== undefined && (value < attr.min || value > attr.max)) {
        return { problem: `must be between ${attr.min} and ${attr.max}` };
      }
      return { value };
    }
    case "boolean":
      if (trimmed === "yes") {
        return { value: true };
      }
      if (trimmed === "no") {
        return { value: false };
      }
      return { problem: "must be yes or no" };
    default:
      return { value: trimmed };
  }
}

export interface CollectedValues {
  values: AttributeValues;
  problems: Record<string, string>;
  /** How many similarity-weighted attributes received a value. */
  weightedCount: number;
}

/** Read a set of raw field texts into wire values plus any problems found. */
export function collectValues(
  attrs: AttributeDoc[],
  formValues: Record<string, string>,
): CollectedValues {
  const values: AttributeValues = {};
  const problems: Record<string, string> = {};
  let weightedCount = 0;
  for (const attr of attrs) {
    const text = formValues[attr.name] ?? "";
    const parsed = parseField(attr, text);
    if (parsed.problem !== undefined) {
      problems[attr.name] = parsed.problem;
    } else if (parsed.value !== undefined) {
      values[attr.name] = parsed.value;
      if (isWeighted(attr)) {
        weightedCount += 1;
      }
    }
  }
  return { values, problems, weightedCount };
}

/** Render a wire value for display; unknown values show as a dash. */
export function formatValue(value: unknown): string {
  if (value === undefined || value === null) {
    return "—";
  }
  if (typeof value === "boolean") {
    return value ? "yes" : "no";
  }
  return String(value);
}

/** Render a wire value as raw field text for an editable control. */
export function valueToFieldText(value: unknown): string {
  if (value === undefined || value === null) {
    return "";
  }
  if (typeof value === "boolean") {
    return value ? "yes" : "no";
  }
  return String(value);
}

/** Seed an edit form from a case's values, blanking unknown attributes. */
export function caseToFieldTexts(schema: SchemaDoc, values: AttributeValues): Record<string, string> {
  const texts: Record<string, string> = {};
  for (const attr of schema.attributes) {
    texts[attr.name] = valueToFieldText(values[attr.name]);
  }
  return texts;
}

/**
 * Turn an edit form into a revision payload.  Every schema attribute is
 * included: blank fields map to null so clearing a box clears the value.
 */
export function collectEdits(
  schema: SchemaDoc,
  editValues: Record<string, string>,
): { edits: AttributeValues; problems: Record<string, string> } {
  const edits: AttributeValues = {};
  const problems: Record<string, string> = {};
  for (const attr of schema.attributes) {
    const text = editValues[attr.name] ?? "";
    const parsed = parseField(attr, text);
    if (parsed.problem !== undefined) {
      problems[attr.name] = parsed.problem;
    } else if (parsed.value !== undefined) {
      edits[attr.name] = parsed.value;
    } else {
      edits[attr.name] = null;
    }
  }
  return { edits, problems };
}
