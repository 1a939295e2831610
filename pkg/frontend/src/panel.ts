/** Selected-policy side panel view model.
 *
 * Every utility, accuracy, and disparity row is the payload token verbatim.
 * The only derived figure is the distance to the utopia marker, computed from
 * the anchors payload and labeled as derived.
 */

import { CellData, policyLabel } from "./chart";
import { PointPayload } from "./schemas";
import { lit, num, stringifyLossless } from "./lit";

export interface PanelRow {
  label: string;
  value: string;
}

export interface PanelVM {
  policyId: string;
  policyLabel: string;
  x: string;
  y: string;
  rows: PanelRow[];
  /** canonical policy record; byte-identical to the engine's serialization */
  exportText: string;
  exportName: string;
  distanceToUtopia: string;
  utopiaNearest: boolean;
}

function euclid(ax: number, ay: number, bx: number, by: number): number {
  return Math.hypot(ax - bx, ay - by);
}

export function buildPanel(cell: CellData, point: PointPayload): PanelVM {
  const uv = point.utilities;
  const rows: PanelRow[] = [{ label: "decision-maker utility", value: lit(uv.u_dm) }];
  uv.u_ds.forEach((v, g) => {
    rows.push({ label: `group ${g} subject utility`, value: lit(v) });
  });
  rows.push(
    { label: "pairwise group-utility gap", value: lit(uv.u_sp_egal) },
    { label: "worst-group utility", value: lit(uv.u_sp_rawls) },
    { label: "accuracy", value: lit(point.accuracy) },
    { label: "true-positive-rate disparity", value: lit(point.eo_disparity) },
  );
  const [ux, uy] = cell.anchors.utopia;
  const d = euclid(num(point.x), num(point.y), num(ux), num(uy));
  let nearest = true;
  for (const other of cell.points) {
    if (euclid(num(other.x), num(other.y), num(ux), num(uy)) < d) {
      nearest = false;
      break;
    }
  }
  return {
    policyId: point.policy_id,
    policyLabel: policyLabel(point.policy),
    x: lit(point.x),
    y: lit(point.y),
    rows,
    exportText: stringifyLossless(point.policy),
    exportName: `policy-${point.policy_id}.json`,
    distanceToUtopia: d.toPrecision(6),
    utopiaNearest: nearest,
  };
}
