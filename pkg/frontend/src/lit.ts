/** Literal-preserving numbers.
 *
 * The engine serializes every float with 17 significant digits so its files
 * and HTTP payloads agree bitwise. Parsing responses with lossless-json keeps
 * each numeric token as the exact string the service sent; the UI displays
 * those strings verbatim and only converts to binary64 for geometry (scales,
 * paths), never for anything it shows as a number.
 */

import { LosslessNumber, parse, stringify } from "lossless-json";

export type Lit = LosslessNumber;

export function isLit(v: unknown): v is Lit {
  return v instanceof LosslessNumber;
}

/** Exact payload token, for display. */
export function lit(v: Lit): string {
  return v.value;
}

/** binary64 value, for geometry only. */
export function num(v: Lit): number {
  return Number(v.value);
}

/** Parse a service response without losing numeric tokens. */
export function parseLossless(text: string): unknown {
  return parse(text);
}

/** Re-serialize a parsed subtree; lossless numbers emit their original
 * tokens and key order is preserved, so a subtree round-trips byte-identical
 * to the engine's canonical form. */
export function stringifyLossless(value: unknown): string {
  const out = stringify(value);
  if (out === undefined) {
    throw new Error("value is not serializable");
  }
  return out;
}
