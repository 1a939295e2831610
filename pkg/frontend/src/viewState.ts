/** URL-encodable view state.
 *
 * The whole view lives in the location hash, so reloading a shared URL
 * reproduces the identical view (same handle, same cells, same selection).
 */

import {
  CELL_JUSTICES,
  CLASSES,
  CellJustice,
  PolicyClass,
  SCOPES,
  SPACES,
  SPLITS,
  Scope,
  Space,
  Split,
} from "./schemas";

export interface ViewState {
  handle: string;
  space: Space;
  justice: CellJustice;
  classes: PolicyClass[];
  scope: Scope;
  split: Split;
  selected: string;
}

export const DEFAULT_VIEW: ViewState = {
  handle: "",
  space: "utility",
  justice: "egalitarian",
  classes: ["det", "stoch"],
  scope: "shared",
  split: "train",
  selected: "",
};

function pick<T extends string>(raw: string | null, allowed: readonly T[], fallback: T): T {
  return allowed.includes(raw as T) ? (raw as T) : fallback;
}

export function encodeViewState(s: ViewState): string {
  const params = new URLSearchParams();
  if (s.handle) params.set("h", s.handle);
  params.set("space", s.space);
  params.set("justice", s.justice);
  params.set("classes", s.classes.join(","));
  params.set("scope", s.scope);
  params.set("split", s.split);
  if (s.selected) params.set("sel", s.selected);
  return "#" + params.toString();
}

export function decodeViewState(hash: string): ViewState {
  const params = new URLSearchParams(hash.replace(/^#/, ""));
  const classes = (params.get("classes") ?? "")
    .split(",")
    .filter((c): c is PolicyClass => CLASSES.includes(c as PolicyClass));
  return {
    handle: params.get("h") ?? "",
    space: pick(params.get("space"), SPACES, DEFAULT_VIEW.space),
    justice: pick(params.get("justice"), CELL_JUSTICES, DEFAULT_VIEW.justice),
    classes: classes.length > 0 ? classes : [...DEFAULT_VIEW.classes],
    scope: pick(params.get("scope"), SCOPES, DEFAULT_VIEW.scope),
    split: pick(params.get("split"), SPLITS, DEFAULT_VIEW.split),
    selected: params.get("sel") ?? "",
  };
}

/** Cells are keyed by everything except the class so det and stoch overlay. */
export function cellQueries(s: ViewState): { class: PolicyClass; query: Record<string, string> }[] {
  const justice = s.space === "predictive" ? "none" : s.justice;
  return s.classes.map((klass) => ({
    class: klass,
    query: {
      space: s.space,
      justice,
      class: klass,
      scope: s.scope,
      split: s.split,
    },
  }));
}
