/** What-if editor model: payoff matrix fields as text, validated before any
 * request is built. Invalid entries block submission and carry a field flag
 * the form uses for highlighting. */

export interface MatrixFields {
  /** entries in (decision, outcome) order: u00, u01, u10, u11 */
  values: [string, string, string, string];
}

export interface WhatifForm {
  dm: MatrixFields;
  ds: MatrixFields[];
}

export const MATRIX_ENTRY_LABELS = ["u00", "u01", "u10", "u11"] as const;

export function formFromSpec(spec: { dm: number[] | null; ds: number[][] }): WhatifForm {
  const toFields = (row: number[]): MatrixFields => ({
    values: [String(row[0]), String(row[1]), String(row[2]), String(row[3])],
  });
  return {
    dm: spec.dm === null ? { values: ["", "", "", ""] } : toFields(spec.dm),
    ds: spec.ds.map(toFields),
  };
}

export function emptyForm(groupCount: number): WhatifForm {
  const blank = (): MatrixFields => ({ values: ["", "", "", ""] });
  return { dm: blank(), ds: Array.from({ length: groupCount }, blank) };
}

export interface FieldError {
  matrix: "dm" | "ds";
  group: number;
  entry: number;
}

export function invalidFields(form: WhatifForm): FieldError[] {
  const errors: FieldError[] = [];
  const check = (fields: MatrixFields, matrix: "dm" | "ds", group: number): void => {
    fields.values.forEach((text, entry) => {
      if (text.trim() === "" || !Number.isFinite(Number(text))) {
        errors.push({ matrix, group, entry });
      }
    });
  };
  check(form.dm, "dm", 0);
  form.ds.forEach((m, g) => check(m, "ds", g));
  return errors;
}

/** Request body text for post_whatif; only valid forms serialize. */
export function specText(form: WhatifForm): string {
  if (invalidFields(form).length > 0) {
    throw new Error("form has invalid numeric fields");
  }
  const nums = (m: MatrixFields): number[] => m.values.map((v) => Number(v));
  return JSON.stringify({ dm: nums(form.dm), ds: form.ds.map(nums) });
}
