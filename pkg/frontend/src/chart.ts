/** Front chart view model.
 *
 * Pure data in, pure data out: components render exactly what is built here,
 * and the numbers shown (coordinates, nhv, anchors) are the payload's own
 * tokens. Geometry uses binary64 copies of the same tokens.
 */

import {
  AnchorsPayload,
  FrontPayload,
  PointPayload,
  PolicyRecord,
  WhatifFrontPayload,
  WhatifPayload,
} from "./schemas";
import { Lit, lit, num } from "./lit";

export interface CellData {
  space: string;
  justice: string;
  class: string;
  scope: string;
  split: string;
  anchors_key: string;
  anchors: AnchorsPayload;
  nhv: Lit;
  points: PointPayload[];
}

export function cellFromFront(payload: FrontPayload): CellData {
  return {
    space: payload.space,
    justice: payload.justice,
    class: payload.class,
    scope: payload.scope,
    split: payload.split,
    anchors_key: payload.anchors_key,
    anchors: payload.anchors,
    nhv: payload.nhv,
    points: payload.points,
  };
}

export function cellsFromWhatif(payload: WhatifPayload): CellData[] {
  return payload.fronts.map((f: WhatifFrontPayload) => {
    const anchors = payload.anchors[f.anchors_key];
    if (anchors === undefined) {
      throw new Error(`what-if response lacks anchors for ${f.anchors_key}`);
    }
    return {
      space: f.space,
      justice: f.justice,
      class: f.class,
      scope: f.scope,
      split: f.split,
      anchors_key: f.anchors_key,
      anchors,
      nhv: f.nhv,
      points: f.points,
    };
  });
}

/** Human form of a policy record, built from the payload's own tokens. */
export function policyLabel(p: PolicyRecord): string {
  if (p.kind === "deterministic") {
    return `deterministic tau=[${p.thresholds.map(lit).join(", ")}]`;
  }
  if (p.kind === "stochastic") {
    return `stochastic beta=[${p.betas.map(lit).join(", ")}] gamma=[${p.gammas.map(lit).join(", ")}]`;
  }
  return `mixture lambda=${lit(p.lambda)} of (${policyLabel(p.left)}) and (${policyLabel(p.right)})`;
}

/** Color category for a point: one bucket per beta token, det in its own. */
export function betaKey(p: PolicyRecord): string {
  if (p.kind === "stochastic") {
    return `beta ${p.betas.map(lit).join("/")}`;
  }
  if (p.kind === "deterministic") {
    return "deterministic";
  }
  return "mixture";
}

export interface PointVM {
  id: string;
  x: string;
  y: string;
  gx: number;
  gy: number;
  label: string;
  betaKey: string;
}

export interface SeriesVM {
  class: string;
  nhv: string;
  points: PointVM[];
  /** Stair vertices in data coordinates: horizontal then vertical between
   * consecutive points, matching the dominated-area geometry the reported
   * hypervolume integrates. */
  step: { x: number; y: number }[];
}

export interface MarkerVM {
  name: "utopia" | "nadir" | "reference";
  x: string;
  y: string;
  gx: number;
  gy: number;
}

export interface ChartVM {
  xLabel: string;
  yLabel: string;
  series: SeriesVM[];
  markers: MarkerVM[];
  /** distinct beta buckets in first-seen order; index = palette slot */
  betaKeys: string[];
  empty: string | null;
}

export function stepVertices(points: PointPayload[]): { x: number; y: number }[] {
  const out: { x: number; y: number }[] = [];
  for (let i = 0; i < points.length; i += 1) {
    const p = points[i];
    out.push({ x: num(p.x), y: num(p.y) });
    const next = points[i + 1];
    if (next !== undefined) {
      out.push({ x: num(next.x), y: num(p.y) });
    }
  }
  return out;
}

export function axisLabels(space: string, justice: string): { x: string; y: string } {
  if (space === "predictive") {
    return { x: "accuracy", y: "true-positive-rate disparity" };
  }
  if (justice === "rawlsian") {
    return { x: "decision-maker utility", y: "negated worst-group utility" };
  }
  return { x: "decision-maker utility", y: "pairwise group-utility gap" };
}

function markerList(anchors: AnchorsPayload): MarkerVM[] {
  const names: MarkerVM["name"][] = ["utopia", "nadir", "reference"];
  return names.map((name) => {
    const [ax, ay] = anchors[name];
    return { name, x: lit(ax), y: lit(ay), gx: num(ax), gy: num(ay) };
  });
}

export function buildChart(cells: CellData[]): ChartVM {
  if (cells.length === 0) {
    return {
      xLabel: "",
      yLabel: "",
      series: [],
      markers: [],
      betaKeys: [],
      empty: "no front stored for this cell; pick another view",
    };
  }
  const first = cells[0];
  for (const cell of cells) {
    // overlays share one anchor set; the engine keys them identically
    if (cell.anchors_key !== first.anchors_key) {
      throw new Error(
        `cells disagree on anchors: ${cell.anchors_key} vs ${first.anchors_key}`,
      );
    }
  }
  const labels = axisLabels(first.space, first.justice);
  const betaKeys: string[] = [];
  const series = cells.map((cell) => {
    const points = cell.points.map((p) => {
      const key = betaKey(p.policy);
      if (!betaKeys.includes(key)) {
        betaKeys.push(key);
      }
      return {
        id: p.policy_id,
        x: lit(p.x),
        y: lit(p.y),
        gx: num(p.x),
        gy: num(p.y),
        label: policyLabel(p.policy),
        betaKey: key,
      };
    });
    return {
      class: cell.class,
      nhv: lit(cell.nhv),
      points,
      step: stepVertices(cell.points),
    };
  });
  return {
    xLabel: labels.x,
    yLabel: labels.y,
    series,
    markers: markerList(first.anchors),
    betaKeys,
    empty: null,
  };
}
