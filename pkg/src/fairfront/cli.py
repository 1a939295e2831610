"""Command-line surface: generate data, run sweeps and ablations, project fronts.

Exit codes: 0 success, 2 configuration or usage problems, 3 data problems,
4 anything unexpected. Commands are idempotent; reruns produce byte-identical
files. The default output root comes from FAIRFRONT_OUT_ROOT when set.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import replace

import numpy as np

from .canonical import canonical_json, fmt_float
from .errors import ConfigError, DataError
from .experiment import (
    ALIGN_ALIGNED,
    ALIGN_MISALIGNED,
    ALIGNMENTS,
    ABLATE_COLUMNS,
    ANCHORS_FILE,
    CLASS_DET,
    CLASS_STOCH,
    FRONTS_DIR,
    JUSTICE_NONE,
    SCHEMA_VERSION,
    DATASET_CREDIT,
    DATASET_HIRING,
    SPLIT_TRAIN,
    ExperimentConfig,
    FrontSet,
    SweepResult,
    cell_name,
    config_from_dict,
    extract_fronts,
    load_dataset,
    result_dir_for,
    run_ablation,
    run_sweep,
    split_populations,
)
from .moo import (
    SPACE_PREDICTIVE,
    SPACE_UTILITY,
    Anchors,
    ObjectivePoint,
    hypervolume,
    pareto_front,
    project,
)
from .policy import policy_from_descriptor
from .population import DgmConfig, export_csv, gen_synthetic_credit, gen_synthetic_hiring
from .predictive import accuracy, eo_disparity
from .stakeholders import StakeholderSpec, eval_utilities

OUT_ROOT_ENV = "FAIRFRONT_OUT_ROOT"
PROJECTIONS_DIR = "projections"

_DATASET_ALIASES = {
    "credit": DATASET_CREDIT,
    "hiring": DATASET_HIRING,
    DATASET_CREDIT: DATASET_CREDIT,
    DATASET_HIRING: DATASET_HIRING,
}


def default_out_root() -> str:
    return os.environ.get(OUT_ROOT_ENV, "results")


def _load_config(args) -> ExperimentConfig:
    path = args.config
    if not os.path.isfile(path):
        raise ConfigError("config file %s does not exist" % path)
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("config file %s is not valid JSON: %s" % (path, exc)) from exc
    cfg = config_from_dict(doc)
    out_dir = getattr(args, "out_root", None) or cfg.out_dir or default_out_root()
    if out_dir != cfg.out_dir:
        cfg = replace(cfg, out_dir=out_dir)
    return cfg


# -- gen ----------------------------------------------------------------------


def cmd_gen(args) -> int:
    dataset = _DATASET_ALIASES.get(args.dataset)
    if dataset is None:
        raise ConfigError("unknown dataset %r (expected credit or hiring)" % args.dataset)
    cfg = DgmConfig(
        n=args.n,
        seed=args.seed,
        bias=args.bias,
        beta_L=args.beta_l,
        delta=args.delta,
        rate=args.rate,
        marginalize_noise=not args.raw_noise,
    )
    cfg.validate()
    if not args.out:
        raise ConfigError("--out is required")
    pop = gen_synthetic_credit(cfg) if dataset == DATASET_CREDIT else gen_synthetic_hiring(cfg)
    export_csv(pop, args.out)
    counts = [int(idx.size) for idx in pop.group_indices]
    base_rate = float(np.mean(pop.require_outcomes()))
    print("wrote %s" % args.out)
    print("n %d" % pop.n)
    print("group_counts %s" % " ".join(str(c) for c in counts))
    print("base_rate %s" % fmt_float(base_rate))
    return 0


# -- sweep ---------------------------------------------------------------------


def _print_sweep_tables(cfg: ExperimentConfig, front_set: FrontSet) -> None:
    by_key = {(c.space, c.justice, c.klass, c.scope, c.split): c for c in front_set.cells}
    gain_by = {(g.space, g.justice, g.scope, g.split): g.auc for g in front_set.gains}
    for space in cfg.spaces:
        justices = cfg.justices if space == SPACE_UTILITY else (JUSTICE_NONE,)
        for split_name in cfg.splits:
            for scope in cfg.scopes:
                print()
                print("space %s split %s scope %s" % (space, split_name, scope))
                cols = ["justice"]
                cols.extend("nhv_%s" % klass for klass in cfg.classes)
                if (CLASS_DET in cfg.classes) and (CLASS_STOCH in cfg.classes):
                    cols.append("gain_auc")
                print("\t".join(cols))
                for justice in justices:
                    cells = [justice]
                    for klass in cfg.classes:
                        cell = by_key.get((space, justice, klass, scope, split_name))
                        cells.append("-" if cell is None else fmt_float(cell.nhv))
                    if "gain_auc" in cols:
                        auc = gain_by.get((space, justice, scope, split_name))
                        cells.append("-" if auc is None else fmt_float(auc))
                    print("\t".join(cells))
    for notice in front_set.notices:
        print("notice: %s" % notice)


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    sweep = run_sweep(cfg, workers=args.workers)
    front_set = extract_fronts(sweep)
    print("result %s" % result_dir_for(cfg))
    print("cached %s" % ("true" if sweep.from_cache else "false"))
    _print_sweep_tables(cfg, front_set)
    return 0


# -- ablate ---------------------------------------------------------------------


def _parse_float_list(text: str, what: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError as exc:
        raise ConfigError("invalid %s list %r" % (what, text)) from exc
    if not vals:
        raise ConfigError("%s list is empty" % what)
    return vals


def _parse_int_list(text: str, what: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError as exc:
        raise ConfigError("invalid %s list %r" % (what, text)) from exc
    if not vals:
        raise ConfigError("%s list is empty" % what)
    return vals


def ablation_table(cfg: ExperimentConfig, ratios, alignments, seeds, workers: int = 1) -> str:
    """CSV text with one block per alignment within each ratio."""
    by_alignment = {
        al: run_ablation(cfg, ratios=ratios, alignment=al, seeds=seeds, workers=workers)
        for al in alignments
    }
    out = io.StringIO()
    out.write(",".join(ABLATE_COLUMNS))
    out.write("\n")
    for ratio in ratios:
        for al in alignments:
            for row in by_alignment[al]:
                if row["ratio"] != ratio:
                    continue
                out.write(
                    ",".join(
                        (
                            fmt_float(row["ratio"]),
                            row["alignment"],
                            row["justice"],
                            fmt_float(row["hv_det"]),
                            fmt_float(row["hv_stoch"]),
                            fmt_float(row["gain"]),
                        )
                    )
                )
                out.write("\n")
    return out.getvalue()


def cmd_ablate(args) -> int:
    cfg = _load_config(args)
    ratios = _parse_float_list(args.ratios, "ratio")
    if args.alignment == "both":
        alignments = (ALIGN_ALIGNED, ALIGN_MISALIGNED)
    elif args.alignment in ALIGNMENTS:
        alignments = (args.alignment,)
    else:
        raise ConfigError(
            "alignment must be aligned, misaligned, or both (got %r)" % args.alignment
        )
    seeds = None if args.seeds is None else _parse_int_list(args.seeds, "seed")
    table = ablation_table(cfg, ratios, alignments, seeds, workers=args.workers)
    sys.stdout.write(table)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(table)
        print("wrote %s" % args.out)
    return 0


# -- project ---------------------------------------------------------------------


def boxed_nhv(points_xy, anchor_set: Anchors) -> float:
    """Normalized hypervolume of arbitrary utility-space points inside a fixed box.

    Points outside the reference box contribute nothing instead of raising, so
    projected fronts can be scored against anchors computed from the utility
    fronts alone.
    """
    r = anchor_set.reference
    u = anchor_set.utopia
    hv_max = (u[0] - r[0]) * (r[1] - u[1])
    if hv_max <= 0.0:
        return 0.0
    inside = [(x, y) for x, y in points_xy if x > r[0] and y < r[1]]
    if not inside:
        return 0.0
    pts = [ObjectivePoint(x=x, y=y, policy_id="b%d" % i) for i, (x, y) in enumerate(inside)]
    value = hypervolume(pareto_front(pts), r) / hv_max
    return min(value, 1.0)


def build_projections(sweep: SweepResult, front_set: FrontSet):
    """Projected-front payloads keyed by file name, plus table rows and notices."""
    cfg = sweep.config
    if SPACE_PREDICTIVE not in cfg.spaces:
        raise ConfigError(
            "config has no predictive space; add \"predictive\" to spaces and rerun the sweep"
        )
    if SPACE_UTILITY not in cfg.spaces:
        raise ConfigError("config has no utility space; projection needs both spaces")
    pops = split_populations(cfg, load_dataset(cfg))
    policies = {r.policy_id: policy_from_descriptor(r.descriptor) for r in sweep.rows}
    files: dict[str, dict] = {}
    table: list[tuple[str, str, str, str, float, float]] = []
    notices: list[str] = []
    for justice in cfg.justices:
        for klass in cfg.classes:
            for scope in cfg.scopes:
                for split_name in cfg.splits:
                    pred_key = (SPACE_PREDICTIVE, JUSTICE_NONE, klass, scope, split_name)
                    util_key = (SPACE_UTILITY, justice, klass, scope, split_name)
                    pred = front_set.fronts.get(pred_key)
                    util = front_set.fronts.get(util_key)
                    name = ".".join((justice, klass, scope, split_name))
                    if pred is None or util is None:
                        notices.append("projection %s skipped: empty predictive cell" % name)
                        continue
                    spec = StakeholderSpec(
                        dm=cfg.stakeholders.dm,
                        ds=cfg.stakeholders.ds,
                        justice=justice,
                        eval_mode=cfg.stakeholders.eval_mode,
                    )
                    projected = project(pred, pops[split_name], spec, policies)
                    akey = ".".join((SPACE_UTILITY, justice, split_name))
                    anchor_set = front_set.anchor_sets[akey]
                    nhv_proj = boxed_nhv(
                        [(p.x, p.y) for p in projected.points], anchor_set
                    )
                    util_cell = next(
                        c
                        for c in front_set.cells
                        if (c.space, c.justice, c.klass, c.scope, c.split) == util_key
                    )
                    files[name] = {
                        "schema_version": SCHEMA_VERSION,
                        "justice": justice,
                        "class": klass,
                        "scope": scope,
                        "split": split_name,
                        "anchors_file": ANCHORS_FILE,
                        "anchors_key": akey,
                        "nhv_projected": nhv_proj,
                        "nhv_utility": util_cell.nhv,
                        "predictive_front": "%s/%s" % (FRONTS_DIR, cell_name(*pred_key)),
                        "utility_front": "%s/%s" % (FRONTS_DIR, cell_name(*util_key)),
                        "points": [
                            {"x": p.x, "y": p.y, "policy_id": p.policy_id}
                            for p in projected.points
                        ],
                    }
                    table.append((justice, klass, scope, split_name, nhv_proj, util_cell.nhv))
    return files, table, notices


def cmd_project(args) -> int:
    cfg = _load_config(args)
    sweep = run_sweep(cfg, workers=args.workers)
    front_set = extract_fronts(sweep)
    files, table, notices = build_projections(sweep, front_set)
    proj_dir = os.path.join(result_dir_for(cfg), PROJECTIONS_DIR)
    os.makedirs(proj_dir, exist_ok=True)
    for name in sorted(files):
        with open(os.path.join(proj_dir, name), "w", encoding="utf-8") as fh:
            fh.write(canonical_json(files[name]))
            fh.write("\n")
    print("result %s" % proj_dir)
    print("\t".join(("justice", "class", "scope", "split", "nhv_projected", "nhv_utility")))
    for justice, klass, scope, split_name, nhv_proj, nhv_util in table:
        print(
            "\t".join(
                (justice, klass, scope, split_name, fmt_float(nhv_proj), fmt_float(nhv_util))
            )
        )
    for notice in notices:
        print("notice: %s" % notice)
    return 0


# -- eval ---------------------------------------------------------------------


def cmd_eval(args) -> int:
    """Evaluate one policy record under a config's stakeholders and dataset.

    This is the import half of the explorer's export button: feeding an
    exported record back through here reproduces the utilities the front
    payload reported for that policy.
    """
    cfg = _load_config(args)
    if not os.path.isfile(args.policy):
        raise ConfigError("policy file %s does not exist" % args.policy)
    with open(args.policy, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                "policy file %s is not valid JSON: %s" % (args.policy, exc)
            ) from exc
    if isinstance(doc, dict) and "kind" not in doc and isinstance(doc.get("policy"), dict):
        # a whole exported front point also works; unwrap its record
        doc = doc["policy"]
    policy = policy_from_descriptor(doc)
    if args.split not in cfg.splits:
        raise ConfigError(
            "split %r not in this config (have: %s)" % (args.split, ", ".join(cfg.splits))
        )
    pop = split_populations(cfg, load_dataset(cfg))[args.split]
    uv = eval_utilities(pop, policy, cfg.stakeholders)
    mode = cfg.stakeholders.eval_mode
    payload = {
        "schema_version": SCHEMA_VERSION,
        "split": args.split,
        "policy_id": policy.policy_id,
        "policy": policy.descriptor(),
        "utilities": {
            "u_dm": uv.u_dm,
            "u_ds": list(uv.u_ds),
            "u_sp_egal": uv.u_sp_egal,
            "u_sp_rawls": uv.u_sp_rawls,
        },
        "accuracy": accuracy(pop, policy, mode),
        "eo_disparity": eo_disparity(pop, policy, mode),
    }
    print(canonical_json(payload))
    return 0


# -- serve ----------------------------------------------------------------------


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(out_root=args.out_root or default_out_root(), grid_cap=args.grid_cap)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairfront",
        description="Performance-fairness front analysis over parametric decision policies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic population CSV")
    gen.add_argument("--dataset", required=True, help="credit or hiring")
    gen.add_argument("--n", type=int, required=True, help="population size")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--bias", type=float, default=0.5, help="group-0 probability")
    gen.add_argument("--beta-l", type=float, default=0.03, dest="beta_l")
    gen.add_argument("--delta", type=float, default=0.1)
    gen.add_argument("--rate", type=float, default=0.03)
    gen.add_argument(
        "--raw-noise",
        action="store_true",
        help="use the raw noiseless score instead of the noise-marginalized one",
    )
    gen.add_argument("--out", default=None, help="output CSV path")
    gen.set_defaults(func=cmd_gen)

    sweep = sub.add_parser("sweep", help="run a policy-grid sweep and extract fronts")
    sweep.add_argument("--config", required=True, help="experiment config JSON")
    sweep.add_argument("--workers", type=int, default=1)
    sweep.add_argument("--out-root", default=None, help="result root (default: config, then $%s)" % OUT_ROOT_ENV)
    sweep.set_defaults(func=cmd_sweep)

    ablate = sub.add_parser("ablate", help="hypervolume gain of randomization per payoff ratio")
    ablate.add_argument("--config", required=True, help="experiment config JSON")
    ablate.add_argument("--ratios", required=True, help="comma-separated positive ratios")
    ablate.add_argument(
        "--alignment", default="both", help="aligned, misaligned, or both (default both)"
    )
    ablate.add_argument("--seeds", default=None, help="comma-separated generator seeds")
    ablate.add_argument("--workers", type=int, default=1)
    ablate.add_argument("--out", default=None, help="also write the CSV table to this path")
    ablate.add_argument("--out-root", default=None)
    ablate.set_defaults(func=cmd_ablate)

    proj = sub.add_parser("project", help="project predictive fronts into utility space")
    proj.add_argument("--config", required=True, help="experiment config JSON (both spaces)")
    proj.add_argument("--workers", type=int, default=1)
    proj.add_argument("--out-root", default=None)
    proj.set_defaults(func=cmd_project)

    ev = sub.add_parser("eval", help="evaluate one policy record under a config")
    ev.add_argument("--config", required=True, help="experiment config JSON")
    ev.add_argument(
        "--policy", required=True, help="policy record JSON (an exported front point also works)"
    )
    ev.add_argument("--split", default=SPLIT_TRAIN, help="train or test (default train)")
    ev.add_argument("--out-root", default=None)
    ev.set_defaults(func=cmd_eval)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8710)
    serve.add_argument("--out-root", default=None)
    serve.add_argument("--grid-cap", type=int, default=10**6, dest="grid_cap")
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except DataError as exc:
        print("data error: %s" % exc, file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - last-resort boundary
        print("internal error: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
