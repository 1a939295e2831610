/** Pure view-model logic: URL state, stair geometry, form validation, badge
 * construction, and request serialization. No service involved. */

import { LosslessNumber } from "lossless-json";
import { describe, expect, it } from "vitest";
import { LatestOnly, isAbort } from "../src/api";
import { CellData, betaKey, buildChart, policyLabel, stepVertices } from "../src/chart";
import { buildBadge } from "../src/regime";
import { PointPayload } from "../src/schemas";
import { DEFAULT_VIEW, ViewState, cellQueries, decodeViewState, encodeViewState } from "../src/viewState";
import { emptyForm, formFromSpec, invalidFields, specText } from "../src/whatifForm";

const L = (token: string): LosslessNumber => new LosslessNumber(token);

function point(x: string, y: string, id: string): PointPayload {
  return {
    x: L(x),
    y: L(y),
    policy_id: id,
    policy: { kind: "stochastic", betas: [L("5.0")], gammas: [L("0.5")] },
    utilities: { u_dm: L(x), u_ds: [L("0.1"), L("0.2")], u_sp_egal: L(y), u_sp_rawls: L("0.0") },
    accuracy: L("0.5"),
    eo_disparity: L("0.25"),
  };
}

function cell(points: PointPayload[], overrides: Partial<CellData> = {}): CellData {
  return {
    space: "utility",
    justice: "egalitarian",
    class: "stoch",
    scope: "shared",
    split: "train",
    anchors_key: "utility.egalitarian.train",
    anchors: {
      utopia: [L("1.0"), L("0.0")],
      nadir: [L("0.0"), L("1.0")],
      reference: [L("-0.1"), L("1.1")],
    },
    nhv: L("0.75"),
    points,
    ...overrides,
  };
}

describe("view state", () => {
  it("round-trips through the URL hash", () => {
    const view: ViewState = {
      handle: "abc123",
      space: "utility",
      justice: "rawlsian",
      classes: ["stoch"],
      scope: "group_specific",
      split: "test",
      selected: "deadbeef",
    };
    expect(decodeViewState(encodeViewState(view))).toEqual(view);
  });

  it("falls back to defaults on junk", () => {
    const view = decodeViewState("#space=nope&justice=wat&classes=x,y&split=z");
    expect(view).toEqual(DEFAULT_VIEW);
  });

  it("queries the none justice for predictive space", () => {
    const qs = cellQueries({ ...DEFAULT_VIEW, space: "predictive", classes: ["det", "stoch"] });
    expect(qs).toHaveLength(2);
    for (const q of qs) {
      expect(q.query.justice).toBe("none");
    }
    expect(qs.map((q) => q.class)).toEqual(["det", "stoch"]);
  });
});

describe("stair geometry", () => {
  it("emits horizontal-then-vertical corners between consecutive points", () => {
    const pts = [point("1.0", "0.5", "a"), point("0.8", "0.3", "b"), point("0.2", "0.1", "c")];
    const verts = stepVertices(pts);
    expect(verts).toHaveLength(5);
    expect(verts[0]).toEqual({ x: 1.0, y: 0.5 });
    expect(verts[1]).toEqual({ x: 0.8, y: 0.5 });
    expect(verts[2]).toEqual({ x: 0.8, y: 0.3 });
    expect(verts[3]).toEqual({ x: 0.2, y: 0.3 });
    expect(verts[4]).toEqual({ x: 0.2, y: 0.1 });
  });

  it("is a single vertex for a singleton front", () => {
    expect(stepVertices([point("0.4", "0.2", "a")])).toEqual([{ x: 0.4, y: 0.2 }]);
  });
});

describe("chart building", () => {
  it("reports an empty state instead of crashing on a missing cell", () => {
    const vm = buildChart([]);
    expect(vm.empty).toMatch(/no front stored/);
    expect(vm.series).toHaveLength(0);
  });

  it("rejects overlays with mismatched anchors", () => {
    const a = cell([point("1.0", "0.5", "a")]);
    const b = cell([point("0.9", "0.4", "b")], {
      class: "det",
      anchors_key: "utility.rawlsian.train",
    });
    expect(() => buildChart([a, b])).toThrow(/anchors/);
  });

  it("keeps payload tokens verbatim in point and marker fields", () => {
    const vm = buildChart([cell([point("0.10000000000000001", "0.29999999999999999", "a")])]);
    expect(vm.series[0].points[0].x).toBe("0.10000000000000001");
    expect(vm.series[0].points[0].y).toBe("0.29999999999999999");
    expect(vm.series[0].nhv).toBe("0.75");
    expect(vm.markers.find((m) => m.name === "utopia")?.x).toBe("1.0");
  });

  it("buckets colors per beta token with det in its own bucket", () => {
    expect(betaKey({ kind: "deterministic", thresholds: [L("0.5")] })).toBe("deterministic");
    expect(betaKey({ kind: "stochastic", betas: [L("5.0")], gammas: [L("0")] })).toBe("beta 5.0");
  });

  it("labels policies from their payload tokens", () => {
    expect(policyLabel({ kind: "deterministic", thresholds: [L("0.5"), L("0.75")] })).toBe(
      "deterministic tau=[0.5, 0.75]",
    );
    expect(
      policyLabel({
        kind: "mixture",
        lambda: L("0.25"),
        left: { kind: "deterministic", thresholds: [L("0.5")] },
        right: { kind: "stochastic", betas: [L("5.0")], gammas: [L("0.59999999999999998")] },
      }),
    ).toBe(
      "mixture lambda=0.25 of (deterministic tau=[0.5]) and (stochastic beta=[5.0] gamma=[0.59999999999999998])",
    );
  });
});

describe("what-if form", () => {
  it("flags empty and non-numeric entries with field coordinates", () => {
    const form = emptyForm(1);
    form.dm.values = ["0", "1e3", "-2.5", "0.0"];
    form.ds[0].values = ["", "abc", "1", "Infinity"];
    const errors = invalidFields(form);
    expect(errors).toEqual([
      { matrix: "ds", group: 0, entry: 0 },
      { matrix: "ds", group: 0, entry: 1 },
      { matrix: "ds", group: 0, entry: 3 },
    ]);
    expect(() => specText(form)).toThrow(/invalid/);
  });

  it("serializes a valid form as a bare stakeholder body", () => {
    const form = formFromSpec({ dm: [0, 0, -0.4431, 28.5473], ds: [[0, -1, -5, 10]] });
    expect(invalidFields(form)).toHaveLength(0);
    expect(JSON.parse(specText(form))).toEqual({
      dm: [0, 0, -0.4431, 28.5473],
      ds: [[0, -1, -5, 10]],
    });
  });
});

describe("regime badge", () => {
  it("is unavailable before any what-if", () => {
    expect(buildBadge(null).available).toBe(false);
  });

  it("maps predictions to labels and keeps tokens", () => {
    const vm = buildBadge({
      asymmetry_ratio: L("64.424284360189568"),
      alignments: [L("287.68850000000003"), L("-287.68850000000003")],
      egal_prediction: "gain",
      rawls_prediction: "no_gain",
      curvature_violations: [[L("1")]],
    });
    expect(vm.available).toBe(true);
    expect(vm.ratio).toBe("64.424284360189568");
    expect(vm.alignments[1]).toBe("-287.68850000000003");
    expect(vm.egalLabel).toBe("randomization expected to help");
    expect(vm.rawlsLabel).toBe("no stochastic gain expected");
  });
});

describe("latest-only requests", () => {
  it("aborts the superseded task when a newer one starts", async () => {
    const latest = new LatestOnly();
    const first = latest.run(
      (signal) =>
        new Promise((_resolve, reject) => {
          signal.addEventListener("abort", () =>
            reject(new DOMException("aborted", "AbortError")),
          );
        }),
    );
    const second = latest.run((signal) => {
      expect(signal.aborted).toBe(false);
      return Promise.resolve("fresh");
    });
    await expect(second).resolves.toBe("fresh");
    await expect(first).rejects.toSatisfy(isAbort);
  });

  it("cancel aborts the in-flight task", async () => {
    const latest = new LatestOnly();
    const task = latest.run(
      (signal) =>
        new Promise((_resolve, reject) => {
          signal.addEventListener("abort", () =>
            reject(new DOMException("aborted", "AbortError")),
          );
        }),
    );
    latest.cancel();
    await expect(task).rejects.toSatisfy(isAbort);
  });
});
