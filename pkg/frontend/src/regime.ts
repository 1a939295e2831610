/** Regime badge view model: gain or no-gain per justice notion, with the
 * asymmetry ratio and per-group alignment tokens shown verbatim. */

import { RegimePayload } from "./schemas";
import { lit } from "./lit";

export interface BadgeVM {
  available: boolean;
  ratio: string;
  alignments: string[];
  egal: "gain" | "no_gain";
  rawls: "gain" | "no_gain";
  egalLabel: string;
  rawlsLabel: string;
}

const GAIN_LABEL = "randomization expected to help";
const NO_GAIN_LABEL = "no stochastic gain expected";

export function buildBadge(regime: RegimePayload | null): BadgeVM {
  if (regime === null) {
    return {
      available: false,
      ratio: "",
      alignments: [],
      egal: "no_gain",
      rawls: "no_gain",
      egalLabel: "",
      rawlsLabel: "",
    };
  }
  return {
    available: true,
    ratio: lit(regime.asymmetry_ratio),
    alignments: regime.alignments.map(lit),
    egal: regime.egal_prediction,
    rawls: regime.rawls_prediction,
    egalLabel: regime.egal_prediction === "gain" ? GAIN_LABEL : NO_GAIN_LABEL,
    rawlsLabel: regime.rawls_prediction === "gain" ? GAIN_LABEL : NO_GAIN_LABEL,
  };
}
