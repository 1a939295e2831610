/** Payload shapes for the five service endpoints, validated with zod.
 *
 * Numbers are LosslessNumber instances (see lit.ts), never plain JS numbers,
 * so every schema uses the jnum guard. Strings named like enum tokens use the
 * engine's exact values.
 */

import { LosslessNumber } from "lossless-json";
import { z } from "zod";

export const SPACES = ["utility", "predictive"] as const;
export const JUSTICES = ["egalitarian", "rawlsian"] as const;
export const CELL_JUSTICES = ["egalitarian", "rawlsian", "none"] as const;
export const CLASSES = ["det", "stoch"] as const;
export const SCOPES = ["shared", "group_specific"] as const;
export const SPLITS = ["train", "test"] as const;

export type Space = (typeof SPACES)[number];
export type Justice = (typeof JUSTICES)[number];
export type CellJustice = (typeof CELL_JUSTICES)[number];
export type PolicyClass = (typeof CLASSES)[number];
export type Scope = (typeof SCOPES)[number];
export type Split = (typeof SPLITS)[number];

const jnum = z.instanceof(LosslessNumber);

const pair = z.tuple([jnum, jnum]);

export const anchorsSchema = z.object({
  utopia: pair,
  nadir: pair,
  reference: pair,
});
export type AnchorsPayload = z.infer<typeof anchorsSchema>;

const deterministicSchema = z.object({
  kind: z.literal("deterministic"),
  thresholds: z.array(jnum),
});

const stochasticSchema = z.object({
  kind: z.literal("stochastic"),
  betas: z.array(jnum),
  gammas: z.array(jnum),
});

export type PolicyRecord =
  | z.infer<typeof deterministicSchema>
  | z.infer<typeof stochasticSchema>
  | { kind: "mixture"; lambda: LosslessNumber; left: PolicyRecord; right: PolicyRecord };

const mixtureSchema: z.ZodType<PolicyRecord> = z.lazy(() =>
  z.union([
    deterministicSchema,
    stochasticSchema,
    z.object({
      kind: z.literal("mixture"),
      lambda: jnum,
      left: mixtureSchema,
      right: mixtureSchema,
    }),
  ]),
);

export const policySchema = mixtureSchema;

export const utilitiesSchema = z.object({
  u_dm: jnum,
  u_ds: z.array(jnum),
  u_sp_egal: jnum,
  u_sp_rawls: jnum,
});
export type UtilitiesPayload = z.infer<typeof utilitiesSchema>;

export const pointSchema = z.object({
  x: jnum,
  y: jnum,
  policy_id: z.string(),
  policy: policySchema,
  utilities: utilitiesSchema,
  accuracy: jnum,
  eo_disparity: jnum,
});
export type PointPayload = z.infer<typeof pointSchema>;

export const frontSchema = z.object({
  schema_version: jnum,
  space: z.enum(SPACES),
  justice: z.enum(CELL_JUSTICES),
  class: z.enum(CLASSES),
  scope: z.enum(SCOPES),
  split: z.enum(SPLITS),
  anchors_key: z.string(),
  anchors: anchorsSchema,
  nhv: jnum,
  points: z.array(pointSchema),
});
export type FrontPayload = z.infer<typeof frontSchema>;

export const whatifFrontSchema = z.object({
  space: z.enum(SPACES),
  justice: z.enum(CELL_JUSTICES),
  class: z.enum(CLASSES),
  scope: z.enum(SCOPES),
  split: z.enum(SPLITS),
  anchors_key: z.string(),
  nhv: jnum,
  points: z.array(pointSchema),
});
export type WhatifFrontPayload = z.infer<typeof whatifFrontSchema>;

export const regimeSchema = z.object({
  asymmetry_ratio: jnum,
  alignments: z.array(jnum),
  egal_prediction: z.enum(["gain", "no_gain"]),
  rawls_prediction: z.enum(["gain", "no_gain"]),
  curvature_violations: z.array(z.array(jnum)),
});
export type RegimePayload = z.infer<typeof regimeSchema>;

export const whatifSchema = z.object({
  schema_version: jnum,
  handle: z.string(),
  fronts: z.array(whatifFrontSchema),
  anchors: z.record(z.string(), anchorsSchema),
  regime: regimeSchema.nullable(),
});
export type WhatifPayload = z.infer<typeof whatifSchema>;

export const curveSchema = z.object({
  schema_version: jnum,
  handle: z.string(),
  policy_id: z.string(),
  policy: policySchema,
  grid: z.array(jnum),
  groups: z.array(z.array(jnum)),
});
export type CurvePayload = z.infer<typeof curveSchema>;

export const sweepResponseSchema = z.object({
  schema_version: jnum,
  handle: z.string(),
  status: z.string(),
  cached: z.boolean(),
  result_dir: z.string(),
});
export type SweepResponse = z.infer<typeof sweepResponseSchema>;

export const healthSchema = z.object({
  schema_version: jnum,
  status: z.string(),
});

export const errorSchema = z.object({
  error: z.string().optional(),
  detail: z.unknown().optional(),
});
