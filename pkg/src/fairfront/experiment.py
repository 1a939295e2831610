"""Experiment orchestration: sweeps over policy grids, front extraction,
metrics, ablations, and result-directory persistence.

The sweep evaluator aggregates per-group partial sums for every unique
per-group parameter and then combines them per policy. Accumulation mirrors
eval_utilities exactly (same slices, same np.sum calls, same group-ascending
adds), so sweep rows are bit-identical to one-policy evaluation and to each
other across worker counts.
"""

from __future__ import annotations

import csv
import json
import os
import shutil
import uuid
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .canonical import canonical_json, fmt_float, parse_float, stable_digest
from .errors import ConfigError, DataError, MetricUndefinedError, SchemaError
from .moo import (
    SPACE_PREDICTIVE,
    SPACE_UTILITY,
    Anchors,
    Front,
    ObjectivePoint,
    anchors,
    fairness_gain,
    hypervolume,
    nhv,
    pareto_front,
)
from .numerics import sigmoid
from .policy import (
    SCOPE_GROUP,
    SCOPE_SHARED,
    DeterministicPolicy,
    GridSpec,
    MixturePolicy,
    StochasticPolicy,
)
from .population import (
    DgmConfig,
    Population,
    gen_synthetic_credit,
    gen_synthetic_hiring,
    ingest_csv,
    split as split_population,
)
from .stakeholders import (
    JUSTICE_EGALITARIAN,
    JUSTICE_RAWLSIAN,
    JUSTICES,
    MODE_EMPIRICAL,
    MODE_PROBABILISTIC,
    StakeholderSpec,
    UtilityMatrix,
    UtilityVector,
    unfairness,
)
from .theory import RegimeReport, classify_regime

SCHEMA_VERSION = 1

DATASET_CREDIT = "synthetic_credit"
DATASET_HIRING = "synthetic_hiring"
SYNTHETIC_DATASETS = (DATASET_CREDIT, DATASET_HIRING)

CLASS_DET = "det"
CLASS_STOCH = "stoch"
CLASSES = (CLASS_DET, CLASS_STOCH)
_KIND_OF_CLASS = {CLASS_DET: "deterministic", CLASS_STOCH: "stochastic"}

SCOPES = (SCOPE_SHARED, SCOPE_GROUP)
SPACES = (SPACE_UTILITY, SPACE_PREDICTIVE)

SPLIT_TRAIN = "train"
SPLIT_TEST = "test"

# predictive fronts have no welfare axis; their cells carry this tag instead
JUSTICE_NONE = "none"

ALIGN_ALIGNED = "aligned"
ALIGN_MISALIGNED = "misaligned"
ALIGNMENTS = (ALIGN_ALIGNED, ALIGN_MISALIGNED)

ABLATE_COLUMNS = ("ratio", "alignment", "justice", "hv_det", "hv_stoch", "gain")

ROWS_FILE_TEMPLATE = "sweep.%s.rows"
FRONTS_DIR = "fronts"
METRICS_FILE = "metrics.summary"
REGIME_FILE = "regime.report"
ANCHORS_FILE = "anchors.json"
CONFIG_FILE = "config.json"


def _ordered_subset(values, universe, what: str) -> tuple[str, ...]:
    vals = list(values)
    if not vals:
        raise ConfigError("%s selection must be non-empty" % what)
    for v in vals:
        if v not in universe:
            raise ConfigError("unknown %s %r (expected subset of %s)" % (what, v, universe))
    return tuple(u for u in universe if u in vals)


@dataclass(frozen=True)
class SplitSpec:
    fraction: float
    seed: int

    def __post_init__(self) -> None:
        if not (0.0 < self.fraction < 1.0):
            raise ConfigError("split fraction must lie strictly between 0 and 1")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs; hashable to a stable identity.

    dataset names a synthetic generator or points at a population CSV. The
    class/scope/space/justice selections are stored in canonical order so that
    semantically equal configs hash equal. out_dir is the root under which the
    hash-named result directory is created; it is excluded from the hash so the
    CLI and the service agree on sweep identity wherever results live.
    """

    dataset: str
    stakeholders: StakeholderSpec
    grid: GridSpec = GridSpec()
    dgm: DgmConfig | None = None
    classes: tuple[str, ...] = CLASSES
    scopes: tuple[str, ...] = (SCOPE_SHARED,)
    spaces: tuple[str, ...] = (SPACE_UTILITY,)
    justices: tuple[str, ...] = (JUSTICE_EGALITARIAN, JUSTICE_RAWLSIAN)
    split: SplitSpec | None = None
    out_dir: str = ""

    def __post_init__(self) -> None:
        if not self.dataset:
            raise ConfigError("dataset must be a synthetic name or a csv path")
        if self.dataset in SYNTHETIC_DATASETS:
            if self.dgm is None:
                raise ConfigError("synthetic dataset %r needs a dgm section" % self.dataset)
        elif self.dgm is not None:
            raise ConfigError("dgm only applies to synthetic datasets")
        object.__setattr__(self, "classes", _ordered_subset(self.classes, CLASSES, "class"))
        object.__setattr__(self, "scopes", _ordered_subset(self.scopes, SCOPES, "scope"))
        object.__setattr__(self, "spaces", _ordered_subset(self.spaces, SPACES, "space"))
        object.__setattr__(
            self, "justices", _ordered_subset(self.justices, JUSTICES, "justice")
        )
        self.grid.validate()
        if self.dgm is not None:
            self.dgm.validate()

    @property
    def group_count(self) -> int:
        return len(self.stakeholders.ds)

    @property
    def splits(self) -> tuple[str, ...]:
        return (SPLIT_TRAIN, SPLIT_TEST) if self.split is not None else (SPLIT_TRAIN,)

    def to_dict(self) -> dict:
        sk = self.stakeholders
        return {
            "schema_version": SCHEMA_VERSION,
            "dataset": self.dataset,
            "dgm": None
            if self.dgm is None
            else {
                "n": self.dgm.n,
                "seed": self.dgm.seed,
                "bias": self.dgm.bias,
                "beta_L": self.dgm.beta_L,
                "delta": self.dgm.delta,
                "rate": self.dgm.rate,
                "marginalize_noise": self.dgm.marginalize_noise,
            },
            "stakeholders": {
                "dm": None if sk.dm is None else list(sk.dm.as_tuple()),
                "ds": [list(m.as_tuple()) for m in sk.ds],
                "justice": sk.justice,
                "eval_mode": sk.eval_mode,
            },
            "grid": {
                "threshold_count": self.grid.threshold_count,
                "threshold_lo": self.grid.threshold_lo,
                "threshold_hi": self.grid.threshold_hi,
                "betas": list(self.grid.betas),
                "full_group_cross": self.grid.full_group_cross,
            },
            "classes": list(self.classes),
            "scopes": list(self.scopes),
            "spaces": list(self.spaces),
            "justices": list(self.justices),
            "split": None
            if self.split is None
            else {"fraction": self.split.fraction, "seed": self.split.seed},
            "out_dir": self.out_dir,
        }

    @property
    def config_hash(self) -> str:
        payload = self.to_dict()
        payload.pop("out_dir")
        return stable_digest(payload)


def _matrix_from(field_path: str, value) -> UtilityMatrix:
    if not isinstance(value, (list, tuple)) or len(value) != 4:
        raise ConfigError("%s: expected four payoff entries [u00, u01, u10, u11]" % field_path)
    try:
        return UtilityMatrix(*(float(v) for v in value))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise ConfigError("%s: %s" % (field_path, exc)) from exc
        raise ConfigError("%s: entries must be numbers" % field_path) from exc


def stakeholders_from_dict(sk, path: str = "stakeholders") -> StakeholderSpec:
    """Parse a stakeholder section; errors carry the offending field path."""
    if not isinstance(sk, dict):
        raise ConfigError("%s: expected a key-value section" % path)
    if "ds" not in sk:
        raise ConfigError("%s.ds: required field missing" % path)
    justice = sk.get("justice", JUSTICE_EGALITARIAN)
    if justice not in JUSTICES:
        raise ConfigError("%s.justice: unknown justice %r" % (path, justice))
    eval_mode = sk.get("eval_mode", MODE_PROBABILISTIC)
    if eval_mode not in (MODE_PROBABILISTIC, MODE_EMPIRICAL):
        raise ConfigError("%s.eval_mode: unknown mode %r" % (path, eval_mode))
    ds_raw = sk.get("ds")
    if not isinstance(ds_raw, (list, tuple)) or not ds_raw:
        raise ConfigError("%s.ds: expected a non-empty list of payoff matrices" % path)
    return StakeholderSpec(
        dm=None if sk.get("dm") is None else _matrix_from("%s.dm" % path, sk["dm"]),
        ds=tuple(_matrix_from("%s.ds[%d]" % (path, i), m) for i, m in enumerate(ds_raw)),
        justice=justice,
        eval_mode=eval_mode,
    )


def config_from_dict(d: dict) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ConfigError("config must be a key-value document")
    missing = [k for k in ("dataset", "stakeholders") if k not in d]
    sk = d.get("stakeholders")
    if isinstance(sk, dict) and "ds" not in sk:
        missing.append("stakeholders.ds")
    if missing:
        raise ConfigError("config missing required fields: %s" % ", ".join(missing))
    stakeholders = stakeholders_from_dict(sk)
    try:
        dgm = d.get("dgm")
        sp = d.get("split")
        grid = d.get("grid") or {}
        return ExperimentConfig(
            dataset=d["dataset"],
            dgm=None
            if dgm is None
            else DgmConfig(
                n=int(dgm["n"]),
                seed=int(dgm.get("seed", 0)),
                bias=float(dgm.get("bias", 0.5)),
                beta_L=float(dgm.get("beta_L", 0.03)),
                delta=float(dgm.get("delta", 0.1)),
                rate=float(dgm.get("rate", 0.03)),
                marginalize_noise=bool(dgm.get("marginalize_noise", True)),
            ),
            stakeholders=stakeholders,
            grid=GridSpec(
                threshold_count=int(grid.get("threshold_count", 100)),
                threshold_lo=float(grid.get("threshold_lo", 0.01)),
                threshold_hi=float(grid.get("threshold_hi", 0.99)),
                betas=tuple(float(b) for b in grid.get("betas", GridSpec().betas)),
                full_group_cross=bool(grid.get("full_group_cross", False)),
            ),
            classes=tuple(d.get("classes", CLASSES)),
            scopes=tuple(d.get("scopes", (SCOPE_SHARED,))),
            spaces=tuple(d.get("spaces", (SPACE_UTILITY,))),
            justices=tuple(d.get("justices", JUSTICES)),
            split=None if sp is None else SplitSpec(float(sp["fraction"]), int(sp["seed"])),
            out_dir=str(d.get("out_dir", "")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("malformed experiment config: %s" % exc) from exc


def load_dataset(cfg: ExperimentConfig) -> Population:
    if cfg.dataset == DATASET_CREDIT:
        return gen_synthetic_credit(cfg.dgm)
    if cfg.dataset == DATASET_HIRING:
        return gen_synthetic_hiring(cfg.dgm)
    return ingest_csv(cfg.dataset)


def split_populations(cfg: ExperimentConfig, pop: Population) -> dict[str, Population]:
    if cfg.split is None:
        return {SPLIT_TRAIN: pop}
    train, test = split_population(pop, cfg.split.fraction, cfg.split.seed)
    return {SPLIT_TRAIN: train, SPLIT_TEST: test}


# -- sweep rows ---------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    policy_id: str
    split: str
    klass: str
    scope: str
    descriptor: dict
    utilities: UtilityVector
    accuracy: float
    eo_disparity: float


@dataclass(frozen=True)
class SweepResult:
    config: ExperimentConfig
    rows: tuple[SweepRow, ...]
    from_cache: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        seen: set[tuple[str, str]] = set()
        for r in self.rows:
            key = (r.policy_id, r.split)
            if key in seen:
                raise ConfigError("duplicate sweep row for policy %s split %s" % key)
            seen.add(key)

    @property
    def config_hash(self) -> str:
        return self.config.config_hash

    @property
    def group_count(self) -> int:
        return self.config.group_count

    @property
    def splits(self) -> tuple[str, ...]:
        return self.config.splits

    def rows_for(self, split: str) -> tuple[SweepRow, ...]:
        return tuple(r for r in self.rows if r.split == split)

    def row_index(self) -> dict[tuple[str, str], SweepRow]:
        return {(r.policy_id, r.split): r for r in self.rows}


# -- grid plans and the table evaluator -----------------------------------------


@dataclass(frozen=True)
class _ParamPlan:
    """Unique per-group parameters plus per-policy parameter indices.

    index has one row per group for group scope and a single shared row
    otherwise; column j gives the unique-parameter index of policy j in
    enumeration order.
    """

    kind: str
    scope: str
    params: tuple[tuple, ...]
    index: np.ndarray


def _param_plan(grid: GridSpec, klass: str, scope: str, group_count: int) -> _ParamPlan:
    kind = _KIND_OF_CLASS[klass]
    ts = [float(v) for v in grid.threshold_values()]
    g = 1 if scope == SCOPE_SHARED else group_count
    if scope == SCOPE_GROUP and group_count < 2:
        raise ConfigError("group_specific grids need at least two groups")
    if kind == "deterministic":
        params = tuple(("det", t) for t in ts)
        index = np.indices((len(ts),) * g).reshape(g, -1)
        return _ParamPlan(kind, scope, params, index)
    pairs = [(float(b), t) for b in grid.betas for t in ts]
    params = tuple(("stoch", b, t) for b, t in pairs)
    if scope == SCOPE_SHARED:
        index = np.arange(len(pairs))[None, :]
    elif grid.full_group_cross:
        index = np.indices((len(pairs),) * g).reshape(g, -1)
    else:
        t_block = np.indices((len(ts),) * g).reshape(g, -1)
        blocks = [bi * len(ts) + t_block for bi in range(len(grid.betas))]
        index = np.concatenate(blocks, axis=1)
    return _ParamPlan(kind, scope, params, index)


def _plan_policies(grid: GridSpec, klass: str, scope: str, group_count: int):
    """Policy objects in the same order as _ParamPlan columns."""
    return grid.enumerate_policies(_KIND_OF_CLASS[klass], scope, group_count)


class _SplitEvaluator:
    """Per-split, per-group partial aggregates for every unique parameter.

    Every table entry repeats the exact reduction eval_utilities performs for
    that group: elementwise weights on the group slice, one np.sum, one divide.
    """

    def __init__(self, pop: Population, spec: StakeholderSpec, predictive: bool = True):
        if len(spec.ds) != pop.group_count:
            raise ConfigError(
                "spec has %d decision-subject matrices but population has %d groups"
                % (len(spec.ds), pop.group_count)
            )
        self.pop = pop
        self.spec = spec
        self.predictive = predictive
        self.n = pop.n
        self.group_count = pop.group_count
        if spec.eval_mode == "probabilistic":
            pos_full = pop.score
        else:
            pos_full = pop.require_outcomes().astype(np.float64)
        if pop.dm_entries is not None:
            dm_acc_full = pos_full * pop.dm_entries[:, 3] + (1.0 - pos_full) * pop.dm_entries[:, 2]
            dm_rej_full = pos_full * pop.dm_entries[:, 1] + (1.0 - pos_full) * pop.dm_entries[:, 0]
        elif spec.dm is not None:
            dm_acc_full = pos_full * spec.dm.u11 + (1.0 - pos_full) * spec.dm.u10
            dm_rej_full = pos_full * spec.dm.u01 + (1.0 - pos_full) * spec.dm.u00
        else:
            raise ConfigError(
                "spec requests per-instance decision-maker entries but the population has none"
            )
        self.scores: list[np.ndarray] = []
        self.sizes: list[int] = []
        self.pos: list[np.ndarray] = []
        self.dm_acc: list[np.ndarray] = []
        self.dm_rej: list[np.ndarray] = []
        self.ds_acc: list[np.ndarray] = []
        self.ds_rej: list[np.ndarray] = []
        self.pos_denom: list[float] = []
        for g in range(pop.group_count):
            idx = pop.group_indices[g]
            pos_g = pos_full[idx]
            self.scores.append(pop.score[idx])
            self.sizes.append(int(idx.size))
            self.pos.append(pos_g)
            self.dm_acc.append(dm_acc_full[idx])
            self.dm_rej.append(dm_rej_full[idx])
            m = spec.ds[g]
            self.ds_acc.append(pos_g * m.u11 + (1.0 - pos_g) * m.u10)
            self.ds_rej.append(pos_g * m.u01 + (1.0 - pos_g) * m.u00)
            denom = float(np.sum(pos_g))
            if predictive and denom == 0.0:
                raise MetricUndefinedError(
                    "group %d has no positive mass; equality-of-opportunity is undefined" % g
                )
            self.pos_denom.append(denom)
        self._tables: dict[tuple, tuple] = {}

    def _acceptance(self, g: int, param: tuple) -> np.ndarray:
        s = self.scores[g]
        if param[0] == "det":
            return (s >= param[1]).astype(np.float64)
        _, beta, gamma = param
        return sigmoid(beta * (s - gamma))

    def tables(self, params: tuple[tuple, ...]):
        """Per-group float arrays (dm, ds, acc, tpr), one entry per parameter."""
        key = params
        hit = self._tables.get(key)
        if hit is not None:
            return hit
        dm_t, ds_t, acc_t, tpr_t = [], [], [], []
        for g in range(self.group_count):
            dm_g = np.empty(len(params))
            ds_g = np.empty(len(params))
            acc_g = np.empty(len(params)) if self.predictive else None
            tpr_g = np.empty(len(params)) if self.predictive else None
            pos_g = self.pos[g]
            neg_g = 1.0 - pos_g
            for k, param in enumerate(params):
                a = self._acceptance(g, param)
                one_minus = 1.0 - a
                dm_g[k] = float(np.sum(a * self.dm_acc[g] + one_minus * self.dm_rej[g]))
                ds_g[k] = float(np.sum(a * self.ds_acc[g] + one_minus * self.ds_rej[g])) / self.sizes[g]
                if self.predictive:
                    acc_g[k] = float(np.sum(a * pos_g + one_minus * neg_g))
                    tpr_g[k] = float(np.sum(a * pos_g)) / self.pos_denom[g]
            dm_t.append(dm_g)
            ds_t.append(ds_g)
            acc_t.append(acc_g)
            tpr_t.append(tpr_g)
        out = (dm_t, ds_t, acc_t, tpr_t)
        self._tables[key] = out
        return out

    def cell_arrays(self, plan: _ParamPlan) -> dict[str, np.ndarray]:
        """Per-policy metric arrays for one (class, scope) cell, enumeration order."""
        dm_t, ds_t, acc_t, tpr_t = self.tables(plan.params)
        gidx = [plan.index[0 if plan.scope == SCOPE_SHARED else g] for g in range(self.group_count)]
        u_ds = [ds_t[g][gidx[g]] for g in range(self.group_count)]
        dm_total = 0.0 + dm_t[0][gidx[0]]
        for g in range(1, self.group_count):
            dm_total = dm_total + dm_t[g][gidx[g]]
        u_dm = dm_total / self.n
        egal = np.zeros(u_dm.shape)
        for i in range(self.group_count):
            for j in range(i + 1, self.group_count):
                egal = egal + np.abs(u_ds[i] - u_ds[j])
        rawls = u_ds[0]
        for g in range(1, self.group_count):
            rawls = np.where(u_ds[g] < rawls, u_ds[g], rawls)
        out = {"u_dm": u_dm, "u_ds": u_ds, "egal": egal, "rawls": rawls}
        if self.predictive:
            acc_total = 0.0 + acc_t[0][gidx[0]]
            for g in range(1, self.group_count):
                acc_total = acc_total + acc_t[g][gidx[g]]
            tprs = [tpr_t[g][gidx[g]] for g in range(self.group_count)]
            hi = tprs[0]
            lo = tprs[0]
            for g in range(1, self.group_count):
                hi = np.where(tprs[g] > hi, tprs[g], hi)
                lo = np.where(tprs[g] < lo, tprs[g], lo)
            out["accuracy"] = acc_total / self.n
            out["eo"] = hi - lo
        return out


def _cell_rows(
    cfg: ExperimentConfig, ev: _SplitEvaluator, split_name: str, klass: str, scope: str
) -> list[SweepRow]:
    plan = _param_plan(cfg.grid, klass, scope, cfg.group_count)
    policies = _plan_policies(cfg.grid, klass, scope, cfg.group_count)
    arrays = ev.cell_arrays(plan)
    rows: list[SweepRow] = []
    for j, policy in enumerate(policies):
        uv = UtilityVector(
            u_dm=float(arrays["u_dm"][j]),
            u_ds=tuple(float(arrays["u_ds"][g][j]) for g in range(cfg.group_count)),
            u_sp_egal=float(arrays["egal"][j]),
            u_sp_rawls=float(arrays["rawls"][j]),
        )
        rows.append(
            SweepRow(
                policy_id=policy.policy_id,
                split=split_name,
                klass=klass,
                scope=scope,
                descriptor=policy.descriptor(),
                utilities=uv,
                accuracy=float(arrays["accuracy"][j]),
                eo_disparity=float(arrays["eo"][j]),
            )
        )
    return rows


def _worker_cell(cfg_dict: dict, split_name: str, klass: str, scope: str):
    cfg = config_from_dict(cfg_dict)
    pop = split_populations(cfg, load_dataset(cfg))[split_name]
    ev = _SplitEvaluator(pop, cfg.stakeholders, predictive=True)
    return _cell_rows(cfg, ev, split_name, klass, scope)


def compute_rows(cfg: ExperimentConfig, workers: int = 1) -> tuple[SweepRow, ...]:
    """Every (policy, split) row, in canonical cell-then-enumeration order.

    Work is partitioned by (split, class, scope) cell. Each cell is evaluated
    deterministically in full and cells are merged in canonical order, so the
    result is byte-identical for every worker count.
    """
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    cells = [
        (split_name, klass, scope)
        for split_name in cfg.splits
        for klass in cfg.classes
        for scope in cfg.scopes
    ]
    if workers == 1 or len(cells) == 1:
        pops = split_populations(cfg, load_dataset(cfg))
        evs = {
            split_name: _SplitEvaluator(pops[split_name], cfg.stakeholders, predictive=True)
            for split_name in cfg.splits
        }
        out: list[SweepRow] = []
        for split_name, klass, scope in cells:
            out.extend(_cell_rows(cfg, evs[split_name], split_name, klass, scope))
        return tuple(out)
    cfg_dict = cfg.to_dict()
    with ProcessPoolExecutor(max_workers=min(workers, len(cells))) as pool:
        futures = [pool.submit(_worker_cell, cfg_dict, *cell) for cell in cells]
        out = []
        for f in futures:
            out.extend(f.result())
        return tuple(out)


# -- front extraction -------------------------------------------------------------


@dataclass(frozen=True)
class CellMetrics:
    space: str
    justice: str
    klass: str
    scope: str
    split: str
    points: int
    hv: float
    nhv: float
    anchors_key: str


@dataclass(frozen=True)
class GainMetrics:
    space: str
    justice: str
    scope: str
    split: str
    auc: float


@dataclass(frozen=True)
class FrontSet:
    fronts: dict[tuple[str, str, str, str, str], Front]
    anchor_sets: dict[str, Anchors]
    cells: tuple[CellMetrics, ...]
    gains: tuple[GainMetrics, ...]
    notices: tuple[str, ...]
    regime: RegimeReport | None
    regime_cells: tuple[str, ...]


def _cell_key(space: str, justice: str, klass: str, scope: str, split: str) -> tuple:
    return (space, justice, klass, scope, split)


def cell_name(space: str, justice: str, klass: str, scope: str, split: str) -> str:
    return ".".join((space, justice, klass, scope, split))


def _objective_point(space: str, justice: str, row: SweepRow) -> ObjectivePoint:
    if space == SPACE_UTILITY:
        return ObjectivePoint(
            x=row.utilities.u_dm, y=unfairness(row.utilities, justice), policy_id=row.policy_id
        )
    return ObjectivePoint(x=row.accuracy, y=row.eo_disparity, policy_id=row.policy_id)


def _justices_for_space(space: str, justices: tuple[str, ...]) -> tuple[str, ...]:
    return justices if space == SPACE_UTILITY else (JUSTICE_NONE,)


def extract_fronts(sweep: SweepResult) -> FrontSet:
    """Fronts per (space, justice, class, scope, split) with shared anchors.

    Anchors are computed over the union of every class-scope front inside one
    (space, justice, split) comparison group, never per class. Test fronts keep
    only policies that were Pareto-optimal on train, re-evaluated on test rows
    and re-filtered.
    """
    cfg = sweep.config
    if not sweep.rows:
        raise ConfigError("sweep has no rows to extract fronts from")
    by_cell: dict[tuple[str, str, str], list[SweepRow]] = {}
    for r in sweep.rows:
        by_cell.setdefault((r.split, r.klass, r.scope), []).append(r)
    index = sweep.row_index()

    fronts: dict[tuple, Front] = {}
    notices: list[str] = []
    for space in cfg.spaces:
        for justice in _justices_for_space(space, cfg.justices):
            for klass in cfg.classes:
                for scope in cfg.scopes:
                    train_rows = by_cell.get((SPLIT_TRAIN, klass, scope), [])
                    name = cell_name(space, justice, klass, scope, SPLIT_TRAIN)
                    if not train_rows:
                        notices.append("cell %s skipped: no policies" % name)
                        continue
                    pts = [_objective_point(space, justice, r) for r in train_rows]
                    front = pareto_front(
                        pts, space=space, justice=justice, class_scope="%s.%s" % (klass, scope)
                    )
                    fronts[_cell_key(space, justice, klass, scope, SPLIT_TRAIN)] = front
                    if SPLIT_TEST not in cfg.splits:
                        continue
                    test_pts = []
                    for p in front.points:
                        row = index.get((p.policy_id, SPLIT_TEST))
                        if row is None:
                            raise ConfigError(
                                "policy %s missing from test split" % p.policy_id
                            )
                        test_pts.append(_objective_point(space, justice, row))
                    fronts[_cell_key(space, justice, klass, scope, SPLIT_TEST)] = pareto_front(
                        test_pts, space=space, justice=justice, class_scope="%s.%s" % (klass, scope)
                    )

    anchor_sets: dict[str, Anchors] = {}
    cells: list[CellMetrics] = []
    gains: list[GainMetrics] = []
    for space in cfg.spaces:
        for justice in _justices_for_space(space, cfg.justices):
            for split_name in cfg.splits:
                group = [
                    (klass, scope, fronts[_cell_key(space, justice, klass, scope, split_name)])
                    for klass in cfg.classes
                    for scope in cfg.scopes
                    if _cell_key(space, justice, klass, scope, split_name) in fronts
                ]
                if not group:
                    continue
                akey = ".".join((space, justice, split_name))
                anchor_set = anchors([f for _, _, f in group])
                anchor_sets[akey] = anchor_set
                for klass, scope, front in group:
                    cells.append(
                        CellMetrics(
                            space=space,
                            justice=justice,
                            klass=klass,
                            scope=scope,
                            split=split_name,
                            points=len(front),
                            hv=hypervolume(front, anchor_set.reference),
                            nhv=nhv(front, anchor_set),
                            anchors_key=akey,
                        )
                    )
                if CLASS_DET in cfg.classes and CLASS_STOCH in cfg.classes:
                    for scope in cfg.scopes:
                        det = fronts.get(_cell_key(space, justice, CLASS_DET, scope, split_name))
                        sto = fronts.get(_cell_key(space, justice, CLASS_STOCH, scope, split_name))
                        if det is None or sto is None:
                            continue
                        try:
                            _, auc = fairness_gain(det, sto)
                        except DataError as exc:
                            notices.append(
                                "gain %s.%s.%s.%s skipped: %s"
                                % (space, justice, scope, split_name, exc)
                            )
                            continue
                        gains.append(
                            GainMetrics(
                                space=space, justice=justice, scope=scope, split=split_name, auc=auc
                            )
                        )

    regime: RegimeReport | None = None
    regime_cells: tuple[str, ...] = ()
    if cfg.stakeholders.dm is None:
        notices.append("regime report skipped: per-instance decision-maker entries")
    elif SPACE_UTILITY in cfg.spaces and CLASS_DET in cfg.classes:
        evidence = []
        names = []
        for justice in cfg.justices:
            for scope in cfg.scopes:
                key = _cell_key(SPACE_UTILITY, justice, CLASS_DET, scope, SPLIT_TRAIN)
                if key in fronts:
                    evidence.append(fronts[key])
                    names.append(cell_name(*key))
        regime = classify_regime(cfg.stakeholders, evidence)
        regime_cells = tuple(names)
    else:
        notices.append("regime report skipped: needs utility space and det class")

    return FrontSet(
        fronts=fronts,
        anchor_sets=anchor_sets,
        cells=tuple(cells),
        gains=tuple(gains),
        notices=tuple(notices),
        regime=regime,
        regime_cells=regime_cells,
    )


# -- persistence --------------------------------------------------------------------


def result_dir_for(cfg: ExperimentConfig) -> str:
    if not cfg.out_dir:
        raise ConfigError("config has no out_dir")
    return os.path.join(cfg.out_dir, cfg.config_hash)


def is_complete(result_dir: str) -> bool:
    return os.path.isfile(os.path.join(result_dir, METRICS_FILE))


def _rows_header(group_count: int) -> list[str]:
    head = ["policy_id", "split", "class", "scope", "descriptor", "u_dm"]
    head.extend("u_ds_%d" % g for g in range(group_count))
    head.extend(["u_sp_egal", "u_sp_rawls", "accuracy", "eo_disparity"])
    return head


def _write_rows(path: str, sweep: SweepResult) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_rows_header(sweep.group_count))
        for r in sweep.rows:
            rec = [r.policy_id, r.split, r.klass, r.scope, canonical_json(r.descriptor)]
            rec.append(fmt_float(r.utilities.u_dm))
            rec.extend(fmt_float(v) for v in r.utilities.u_ds)
            rec.extend(
                fmt_float(v)
                for v in (
                    r.utilities.u_sp_egal,
                    r.utilities.u_sp_rawls,
                    r.accuracy,
                    r.eo_disparity,
                )
            )
            writer.writerow(rec)


def _read_rows(path: str, group_count: int) -> tuple[SweepRow, ...]:
    rows: list[SweepRow] = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _rows_header(group_count):
            raise SchemaError("unexpected rows header in %s" % path)
        for rec in reader:
            policy_id, split_name, klass, scope, desc = rec[:5]
            vals = [parse_float(v) for v in rec[5:]]
            u_dm = vals[0]
            u_ds = tuple(vals[1 : 1 + group_count])
            tail = vals[1 + group_count :]
            rows.append(
                SweepRow(
                    policy_id=policy_id,
                    split=split_name,
                    klass=klass,
                    scope=scope,
                    descriptor=json.loads(desc),
                    utilities=UtilityVector(
                        u_dm=u_dm, u_ds=u_ds, u_sp_egal=tail[0], u_sp_rawls=tail[1]
                    ),
                    accuracy=tail[2],
                    eo_disparity=tail[3],
                )
            )
    return tuple(rows)


def point_payload(p: ObjectivePoint, row: SweepRow, utilities: UtilityVector) -> dict:
    """One front point with its policy record and full stakeholder evaluation.

    The utility vector is passed separately so what-if responses can pair the
    stored policy record with utilities re-evaluated under a different spec;
    accuracy and EO disparity never depend on the spec and come from the row.
    """
    return {
        "x": p.x,
        "y": p.y,
        "policy_id": p.policy_id,
        "policy": row.descriptor,
        "utilities": {
            "u_dm": utilities.u_dm,
            "u_ds": list(utilities.u_ds),
            "u_sp_egal": utilities.u_sp_egal,
            "u_sp_rawls": utilities.u_sp_rawls,
        },
        "accuracy": row.accuracy,
        "eo_disparity": row.eo_disparity,
    }


def _front_payload(
    key: tuple[str, str, str, str, str], front: Front, anchor_set: Anchors, nhv_value: float,
    rows: dict[tuple[str, str], SweepRow],
) -> dict:
    space, justice, klass, scope, split_name = key
    return {
        "schema_version": SCHEMA_VERSION,
        "space": space,
        "justice": justice,
        "class": klass,
        "scope": scope,
        "split": split_name,
        "anchors_key": ".".join((space, justice, split_name)),
        "anchors": anchor_set.to_dict(),
        "nhv": nhv_value,
        "points": [
            point_payload(p, rows[(p.policy_id, split_name)], rows[(p.policy_id, split_name)].utilities)
            for p in front.points
        ],
    }


def save_result_dir(sweep: SweepResult, front_set: FrontSet) -> str:
    """Write the complete result directory atomically; reuse an existing one."""
    final = result_dir_for(sweep.config)
    if is_complete(final):
        return final
    os.makedirs(sweep.config.out_dir, exist_ok=True)
    staging = os.path.join(sweep.config.out_dir, ".staging-%s" % uuid.uuid4().hex)
    os.makedirs(os.path.join(staging, FRONTS_DIR))
    h = sweep.config_hash
    try:
        # the stored config omits its location so result dirs are relocatable
        cfg_payload = sweep.config.to_dict()
        cfg_payload["out_dir"] = ""
        with open(os.path.join(staging, CONFIG_FILE), "w", encoding="utf-8") as fh:
            fh.write(canonical_json(cfg_payload))
            fh.write("\n")
        _write_rows(os.path.join(staging, ROWS_FILE_TEMPLATE % h), sweep)
        rows_index = sweep.row_index()
        nhv_by_key = {
            (c.space, c.justice, c.klass, c.scope, c.split): c.nhv for c in front_set.cells
        }
        for key, front in sorted(front_set.fronts.items()):
            akey = ".".join((key[0], key[1], key[4]))
            payload = _front_payload(
                key, front, front_set.anchor_sets[akey], nhv_by_key[key], rows_index
            )
            with open(
                os.path.join(staging, FRONTS_DIR, cell_name(*key)), "w", encoding="utf-8"
            ) as fh:
                fh.write(canonical_json(payload))
                fh.write("\n")
        anchors_payload = {
            k: a.to_dict() for k, a in sorted(front_set.anchor_sets.items())
        }
        with open(os.path.join(staging, ANCHORS_FILE), "w", encoding="utf-8") as fh:
            fh.write(canonical_json({"schema_version": SCHEMA_VERSION, "anchors": anchors_payload}))
            fh.write("\n")
        metrics = {
            "schema_version": SCHEMA_VERSION,
            "config_hash": h,
            "cells": [
                {
                    "space": c.space,
                    "justice": c.justice,
                    "class": c.klass,
                    "scope": c.scope,
                    "split": c.split,
                    "points": c.points,
                    "hv": c.hv,
                    "nhv": c.nhv,
                    "anchors_key": c.anchors_key,
                }
                for c in front_set.cells
            ],
            "gains": [
                {
                    "space": g.space,
                    "justice": g.justice,
                    "scope": g.scope,
                    "split": g.split,
                    "auc": g.auc,
                }
                for g in front_set.gains
            ],
            "notices": list(front_set.notices),
        }
        regime = {
            "schema_version": SCHEMA_VERSION,
            "config_hash": h,
            "available": front_set.regime is not None,
        }
        if front_set.regime is not None:
            rep = front_set.regime
            regime.update(
                {
                    "asymmetry_ratio": rep.asymmetry_ratio,
                    "alignments": list(rep.alignments),
                    "egal_prediction": rep.egal_prediction,
                    "rawls_prediction": rep.rawls_prediction,
                    "curvature_violations": [list(v) for v in rep.curvature_violations],
                    "evidence_cells": list(front_set.regime_cells),
                }
            )
        with open(os.path.join(staging, REGIME_FILE), "w", encoding="utf-8") as fh:
            fh.write(canonical_json(regime))
            fh.write("\n")
        # metrics.summary is the completeness marker, so it lands last
        with open(os.path.join(staging, METRICS_FILE), "w", encoding="utf-8") as fh:
            fh.write(canonical_json(metrics))
            fh.write("\n")
        try:
            os.rename(staging, final)
        except OSError:
            if not is_complete(final):
                raise
        return final
    finally:
        if os.path.isdir(staging):
            shutil.rmtree(staging, ignore_errors=True)


def load_result_dir(result_dir: str) -> SweepResult:
    cfg_path = os.path.join(result_dir, CONFIG_FILE)
    if not os.path.isfile(cfg_path):
        raise SchemaError("no config file in result directory %s" % result_dir)
    with open(cfg_path, "r", encoding="utf-8") as fh:
        cfg = config_from_dict(json.load(fh))
    cfg = replace(cfg, out_dir=os.path.dirname(os.path.abspath(result_dir)))
    rows_path = os.path.join(result_dir, ROWS_FILE_TEMPLATE % cfg.config_hash)
    if not os.path.isfile(rows_path):
        raise SchemaError("no rows file in result directory %s" % result_dir)
    rows = _read_rows(rows_path, cfg.group_count)
    return SweepResult(config=cfg, rows=rows, from_cache=True)


def run_sweep(cfg: ExperimentConfig, workers: int = 1) -> SweepResult:
    """Evaluate the full grid on every split; persist when out_dir is set.

    A completed result directory for the same config hash is reused as is, so
    reruns are idempotent and never rewrite bytes.
    """
    if cfg.out_dir:
        final = result_dir_for(cfg)
        if is_complete(final):
            return load_result_dir(final)
    rows = compute_rows(cfg, workers=workers)
    sweep = SweepResult(config=cfg, rows=rows)
    if cfg.out_dir:
        save_result_dir(sweep, extract_fronts(sweep))
    return sweep


# -- ablation --------------------------------------------------------------------


def _scaled_dm(dm: UtilityMatrix, ratio: float) -> UtilityMatrix:
    if dm.u10 == 0.0:
        raise ConfigError("ablation needs a nonzero false-positive payoff to fix")
    magnitude = ratio * abs(dm.u10)
    sign = 1.0 if dm.u11 >= 0.0 else -1.0
    return UtilityMatrix(u00=dm.u00, u01=dm.u01, u10=dm.u10, u11=sign * magnitude)


def _alignment_ds(ds: tuple[UtilityMatrix, ...], alignment: str) -> tuple[UtilityMatrix, ...]:
    if alignment == ALIGN_ALIGNED:
        return ds
    if len(ds) < 2:
        raise ConfigError("misaligned variant needs at least two groups")
    flipped = UtilityMatrix(-ds[1].u00, -ds[1].u01, -ds[1].u10, -ds[1].u11)
    return ds[:1] + (flipped,) + ds[2:]


def _ablation_cell_fronts(
    ev: _SplitEvaluator, plans: dict[str, _ParamPlan], justice: str
) -> dict[str, Front]:
    fronts = {}
    for klass, plan in plans.items():
        arrays = ev.cell_arrays(plan)
        y = arrays["egal"] if justice == JUSTICE_EGALITARIAN else -arrays["rawls"]
        pts = [
            ObjectivePoint(x=float(arrays["u_dm"][j]), y=float(y[j]), policy_id="%s%d" % (klass, j))
            for j in range(arrays["u_dm"].shape[0])
        ]
        fronts[klass] = pareto_front(pts, space=SPACE_UTILITY, justice=justice)
    return fronts


def run_ablation(
    base_cfg: ExperimentConfig,
    ratios,
    alignment: str,
    seeds=None,
    workers: int = 1,
) -> list[dict]:
    """Normalized hypervolume gain of randomization per payoff-asymmetry ratio.

    For each ratio the decision-maker's true-positive payoff is rescaled so
    |u11|/|u10| equals the ratio with u10 fixed. The misaligned variant flips
    the sign of group 1's subject matrix. Multiple seeds average per-seed
    normalized hypervolumes; anchors are the union of the deterministic and
    stochastic fronts within each (ratio, alignment, justice, seed) cell.
    """
    ratios = [float(r) for r in ratios]
    if not ratios or any(r <= 0.0 for r in ratios):
        raise ConfigError("ratios must be a non-empty list of positive numbers")
    if alignment not in ALIGNMENTS:
        raise ConfigError("alignment must be one of %s" % (ALIGNMENTS,))
    if base_cfg.stakeholders.dm is None:
        raise ConfigError("ablation needs a constant decision-maker matrix")
    if len(base_cfg.scopes) != 1:
        raise ConfigError("ablation runs over exactly one policy scope")
    for klass in CLASSES:
        if klass not in base_cfg.classes:
            raise ConfigError("ablation compares det and stoch classes; both must be enabled")
    if seeds is None:
        seeds = (base_cfg.dgm.seed,) if base_cfg.dgm is not None else (0,)
    seeds = tuple(int(s) for s in seeds)
    if base_cfg.dgm is None and len(seeds) > 1:
        raise ConfigError("multiple seeds only apply to synthetic datasets")

    scope = base_cfg.scopes[0]
    plans = {
        klass: _param_plan(base_cfg.grid, klass, scope, base_cfg.group_count)
        for klass in base_cfg.classes
    }
    ds_variant = _alignment_ds(base_cfg.stakeholders.ds, alignment)

    rows: list[dict] = []
    per_seed: dict[tuple[float, str], list[tuple[float, float]]] = {}
    for seed in seeds:
        if base_cfg.dgm is not None:
            cfg_seed = replace(base_cfg, dgm=replace(base_cfg.dgm, seed=seed), out_dir="")
        else:
            cfg_seed = replace(base_cfg, out_dir="")
        pop = load_dataset(cfg_seed)
        if cfg_seed.split is not None:
            pop = split_populations(cfg_seed, pop)[SPLIT_TRAIN]
        for ratio in ratios:
            spec = StakeholderSpec(
                dm=_scaled_dm(base_cfg.stakeholders.dm, ratio),
                ds=ds_variant,
                justice=base_cfg.stakeholders.justice,
                eval_mode=base_cfg.stakeholders.eval_mode,
            )
            ev = _SplitEvaluator(pop, spec, predictive=False)
            for justice in base_cfg.justices:
                fronts = _ablation_cell_fronts(ev, plans, justice)
                anchor_set = anchors(fronts.values())
                hv_det = nhv(fronts[CLASS_DET], anchor_set)
                hv_stoch = nhv(fronts[CLASS_STOCH], anchor_set)
                per_seed.setdefault((ratio, justice), []).append((hv_det, hv_stoch))
    for ratio in ratios:
        for justice in base_cfg.justices:
            vals = per_seed[(ratio, justice)]
            hv_det = float(np.mean([v[0] for v in vals]))
            hv_stoch = float(np.mean([v[1] for v in vals]))
            rows.append(
                {
                    "ratio": ratio,
                    "alignment": alignment,
                    "justice": justice,
                    "hv_det": hv_det,
                    "hv_stoch": hv_stoch,
                    "gain": hv_stoch - hv_det,
                }
            )
    return rows


# -- decision curves ---------------------------------------------------------------


def decision_curve(policy, score_grid, group_count: int) -> np.ndarray:
    """Acceptance probability over a score grid, one row per group."""
    grid = np.asarray(score_grid, dtype=np.float64)
    if group_count < 1:
        raise ConfigError("group_count must be >= 1")

    def group_param(params: tuple, g: int) -> float:
        if len(params) == 1:
            return params[0]
        if g >= len(params):
            raise ConfigError(
                "policy carries %d parameter sets but group %d was requested" % (len(params), g)
            )
        return params[g]

    def curve(p, g: int) -> np.ndarray:
        if isinstance(p, DeterministicPolicy):
            return (grid >= group_param(p.thresholds, g)).astype(np.float64)
        if isinstance(p, StochasticPolicy):
            beta = group_param(p.betas, g)
            gamma = group_param(p.gammas, g)
            return sigmoid(beta * (grid - gamma))
        if isinstance(p, MixturePolicy):
            return p.lam * curve(p.left, g) + (1.0 - p.lam) * curve(p.right, g)
        raise ConfigError("unsupported policy type %r" % type(p).__name__)

    return np.stack([curve(policy, g) for g in range(group_count)])


# -- what-if re-evaluation ------------------------------------------------------------


def whatif_fronts(
    sweep: SweepResult, stakeholders: StakeholderSpec
) -> tuple[
    dict[tuple, Front],
    dict[str, Anchors],
    tuple[CellMetrics, ...],
    RegimeReport | None,
    dict[tuple[str, str], UtilityVector],
]:
    """Utility-space fronts under a different stakeholder spec.

    Reuses the sweep's policy grid; only utility vectors are re-evaluated, on
    the same populations the sweep saw. Predictive metrics are untouched by
    construction since they do not depend on utilities. The last element maps
    (split, policy_id) to the re-evaluated vector so payloads can carry it.
    """
    cfg = sweep.config
    if len(stakeholders.ds) != cfg.group_count:
        raise ConfigError(
            "what-if spec has %d decision-subject matrices but the sweep uses %d groups"
            % (len(stakeholders.ds), cfg.group_count)
        )
    pops = split_populations(cfg, load_dataset(cfg))
    plans = {
        (klass, scope): _param_plan(cfg.grid, klass, scope, cfg.group_count)
        for klass in cfg.classes
        for scope in cfg.scopes
    }
    policy_ids = {
        key: [p.policy_id for p in _plan_policies(cfg.grid, key[0], key[1], cfg.group_count)]
        for key in plans
    }
    utilities: dict[tuple[str, str], dict[str, UtilityVector]] = {}
    by_split_pid: dict[tuple[str, str], UtilityVector] = {}
    for split_name in cfg.splits:
        ev = _SplitEvaluator(pops[split_name], stakeholders, predictive=False)
        for key, plan in plans.items():
            arrays = ev.cell_arrays(plan)
            per_policy = {}
            for j, pid in enumerate(policy_ids[key]):
                uv = UtilityVector(
                    u_dm=float(arrays["u_dm"][j]),
                    u_ds=tuple(float(arrays["u_ds"][g][j]) for g in range(cfg.group_count)),
                    u_sp_egal=float(arrays["egal"][j]),
                    u_sp_rawls=float(arrays["rawls"][j]),
                )
                per_policy[pid] = uv
                by_split_pid[(split_name, pid)] = uv
            utilities[(split_name, "%s.%s" % key)] = per_policy

    fronts: dict[tuple, Front] = {}
    for justice in cfg.justices:
        for klass in cfg.classes:
            for scope in cfg.scopes:
                table = utilities[(SPLIT_TRAIN, "%s.%s" % (klass, scope))]
                pts = [
                    ObjectivePoint(x=uv.u_dm, y=unfairness(uv, justice), policy_id=pid)
                    for pid, uv in table.items()
                ]
                front = pareto_front(
                    pts,
                    space=SPACE_UTILITY,
                    justice=justice,
                    class_scope="%s.%s" % (klass, scope),
                )
                fronts[_cell_key(SPACE_UTILITY, justice, klass, scope, SPLIT_TRAIN)] = front
                if SPLIT_TEST in cfg.splits:
                    test_table = utilities[(SPLIT_TEST, "%s.%s" % (klass, scope))]
                    test_pts = [
                        ObjectivePoint(
                            x=test_table[p.policy_id].u_dm,
                            y=unfairness(test_table[p.policy_id], justice),
                            policy_id=p.policy_id,
                        )
                        for p in front.points
                    ]
                    fronts[
                        _cell_key(SPACE_UTILITY, justice, klass, scope, SPLIT_TEST)
                    ] = pareto_front(
                        test_pts,
                        space=SPACE_UTILITY,
                        justice=justice,
                        class_scope="%s.%s" % (klass, scope),
                    )

    anchor_sets: dict[str, Anchors] = {}
    cells: list[CellMetrics] = []
    for justice in cfg.justices:
        for split_name in cfg.splits:
            group = [
                (klass, scope, fronts[_cell_key(SPACE_UTILITY, justice, klass, scope, split_name)])
                for klass in cfg.classes
                for scope in cfg.scopes
            ]
            akey = ".".join((SPACE_UTILITY, justice, split_name))
            anchor_set = anchors([f for _, _, f in group])
            anchor_sets[akey] = anchor_set
            for klass, scope, front in group:
                cells.append(
                    CellMetrics(
                        space=SPACE_UTILITY,
                        justice=justice,
                        klass=klass,
                        scope=scope,
                        split=split_name,
                        points=len(front),
                        hv=hypervolume(front, anchor_set.reference),
                        nhv=nhv(front, anchor_set),
                        anchors_key=akey,
                    )
                )
    regime = None
    if stakeholders.dm is not None and CLASS_DET in cfg.classes:
        evidence = [
            fronts[_cell_key(SPACE_UTILITY, justice, CLASS_DET, scope, SPLIT_TRAIN)]
            for justice in cfg.justices
            for scope in cfg.scopes
        ]
        regime = classify_regime(stakeholders, evidence)
    return fronts, anchor_sets, tuple(cells), regime, by_split_pid
