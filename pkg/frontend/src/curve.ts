/** Decision-curve view model: per-group acceptance probability over the score
 * grid, straight from the curve payload. */

import { CurvePayload } from "./schemas";
import { num } from "./lit";
import { policyLabel } from "./chart";

export interface CurveVM {
  policyId: string;
  label: string;
  /** deterministic rules draw as steps; smooth rules as polylines */
  isStep: boolean;
  groups: { x: number; y: number }[][];
}

export function buildCurve(payload: CurvePayload): CurveVM {
  const xs = payload.grid.map(num);
  return {
    policyId: payload.policy_id,
    label: policyLabel(payload.policy),
    isStep: payload.policy.kind === "deterministic",
    groups: payload.groups.map((g) => g.map((v, i) => ({ x: xs[i], y: num(v) }))),
  };
}
