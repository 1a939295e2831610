"""Scored populations: data model, synthetic generators, CSV ingest/export, splits.

A population is the empirical carrier for all downstream evaluation: per-individual
acceptance scores (probabilities), dense integer group ids, optional realized binary
outcomes, and optional per-instance decision-maker utility entries.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .canonical import fmt_float
from .errors import ConfigError, ModeError, RowError, SchemaError, SplitError
from .numerics import sigmoid

DM_COLUMNS = ("dm_u00", "dm_u01", "dm_u10", "dm_u11")


@dataclass(frozen=True)
class Individual:
    score: float
    group: int
    outcome: int | None = None
    dm_entries: tuple[float, float, float, float] | None = None


@dataclass(eq=False)
class Population:
    score: np.ndarray
    group: np.ndarray
    group_count: int
    outcome: np.ndarray | None = None
    dm_entries: np.ndarray | None = None
    seed: int | None = None
    label: str = ""
    group_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        self.score = np.asarray(self.score, dtype=np.float64)
        self.group = np.asarray(self.group, dtype=np.int64)
        if self.outcome is not None:
            self.outcome = np.asarray(self.outcome, dtype=np.int64)
        if self.dm_entries is not None:
            self.dm_entries = np.asarray(self.dm_entries, dtype=np.float64)
        n = self.score.shape[0]
        if n == 0:
            raise ConfigError("population must be non-empty")
        if self.group.shape != (n,):
            raise ConfigError("group array length does not match score array")
        if np.any(self.score < 0.0) or np.any(self.score > 1.0):
            raise ConfigError("scores must lie in [0, 1]")
        if self.group_count < 1:
            raise ConfigError("group_count must be >= 1")
        present = np.unique(self.group)
        if present[0] < 0 or present[-1] >= self.group_count:
            raise ConfigError("group index outside [0, group_count)")
        if present.size != self.group_count:
            raise ConfigError("every group index in [0, group_count) must appear")
        if self.outcome is not None:
            if self.outcome.shape != (n,):
                raise ConfigError("outcome array length does not match score array")
            bad = (self.outcome != 0) & (self.outcome != 1)
            if np.any(bad):
                raise ConfigError("outcomes must be 0 or 1")
        if self.dm_entries is not None and self.dm_entries.shape != (n, 4):
            raise ConfigError("dm_entries must have shape (n, 4)")
        if self.group_labels is not None and len(self.group_labels) != self.group_count:
            raise ConfigError("group_labels length must equal group_count")

    @property
    def n(self) -> int:
        return int(self.score.shape[0])

    @cached_property
    def group_indices(self) -> tuple[np.ndarray, ...]:
        """Per-group index arrays, each in original record order."""
        return tuple(np.flatnonzero(self.group == g) for g in range(self.group_count))

    @property
    def individuals(self) -> list[Individual]:
        out = []
        for i in range(self.n):
            out.append(
                Individual(
                    score=float(self.score[i]),
                    group=int(self.group[i]),
                    outcome=None if self.outcome is None else int(self.outcome[i]),
                    dm_entries=None
                    if self.dm_entries is None
                    else tuple(float(v) for v in self.dm_entries[i]),
                )
            )
        return out

    def require_outcomes(self) -> np.ndarray:
        if self.outcome is None:
            raise ModeError("empirical evaluation requires realized outcomes")
        return self.outcome

    def same_records(self, other: "Population") -> bool:
        """Field-for-field record equality (used by round-trip checks)."""
        if self.n != other.n or self.group_count != other.group_count:
            return False
        if not np.array_equal(self.score, other.score):
            return False
        if not np.array_equal(self.group, other.group):
            return False
        if (self.outcome is None) != (other.outcome is None):
            return False
        if self.outcome is not None and not np.array_equal(self.outcome, other.outcome):
            return False
        if (self.dm_entries is None) != (other.dm_entries is None):
            return False
        if self.dm_entries is not None and not np.array_equal(
            self.dm_entries, other.dm_entries
        ):
            return False
        return True


@dataclass(frozen=True)
class DgmConfig:
    """Knobs for the synthetic structural generators.

    bias is the Bernoulli parameter of the sensitive root; beta_L the savings->loan
    coefficient (credit only, {0, 0.03}); delta the credit outcome-equation
    coefficient (no canonical value exists, default 0.1); rate an interest rate kept
    for callers that recompute per-instance utility entries. marginalize_noise picks
    between the noise-marginalized credit score and the raw noiseless logistic score.
    """

    n: int
    seed: int = 0
    bias: float = 0.5
    beta_L: float = 0.03
    delta: float = 0.1
    rate: float = 0.03
    marginalize_noise: bool = True

    def validate(self) -> None:
        problems = []
        if self.n < 1:
            problems.append("n must be >= 1")
        if not (0.0 < self.bias < 1.0):
            problems.append("bias must lie strictly between 0 and 1")
        if problems:
            raise ConfigError("; ".join(problems))


# Scale of the credit outcome-equation noise term (standard deviation 2, variance 4);
# the marginalized score divides the noiseless logit by sqrt(1 + pi * var / 8).
_CREDIT_OUTCOME_NOISE_VAR = 4.0


def credit_variables(cfg: DgmConfig) -> dict[str, np.ndarray]:
    """All structural variables of the credit generator, keyed by name.

    Noise scales are standard deviations: 0.25, 4, 5, 10, 9 down the cascade."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n
    grp = (rng.random(n) < cfg.bias).astype(np.int64)
    g = grp.astype(np.float64)
    age = -35.0 + rng.gamma(10.0, 3.5, n)
    edu = -0.5 + sigmoid(-1.0 + 0.5 * g + sigmoid(0.1 * age) + rng.normal(0.0, 0.25, n))
    income = -4.0 + 0.1 * (age + 35.0) + 2.0 * g + g * edu + rng.normal(0.0, 4.0, n)
    savings = -4.0 + 1.5 * (income > 0) * income + rng.normal(0.0, 5.0, n)
    loan = (
        1.0
        + 0.01 * (age - 5.0) * (5.0 - age)
        + 2.0 * (1.0 - g)
        + cfg.beta_L * savings
        + rng.normal(0.0, 10.0, n)
    )
    duration = -1.0 + 0.1 * age + 3.0 * (1.0 - g) + loan + rng.normal(0.0, 9.0, n)
    interaction_sign = np.where((income > 0) & (savings > 0), 1.0, -1.0)
    logit = cfg.delta * (-loan - duration) + 0.3 * (
        income + savings + interaction_sign * income * savings
    )
    if cfg.marginalize_noise:
        score = sigmoid(logit / math.sqrt(1.0 + math.pi * _CREDIT_OUTCOME_NOISE_VAR / 8.0))
    else:
        score = sigmoid(logit)
    outcome = (rng.random(n) < score).astype(np.int64)
    return {
        "group": grp,
        "age": age,
        "education": edu,
        "income": income,
        "savings": savings,
        "loan": loan,
        "duration": duration,
        "interaction_sign": interaction_sign,
        "logit": logit,
        "score": score,
        "outcome": outcome,
    }


def gen_synthetic_credit(cfg: DgmConfig) -> Population:
    v = credit_variables(cfg)
    label = (
        "synthetic_credit(n=%d,seed=%d,bias=%s,beta_L=%s,delta=%s,marginalize_noise=%s)"
        % (cfg.n, cfg.seed, fmt_float(cfg.bias), fmt_float(cfg.beta_L), fmt_float(cfg.delta), cfg.marginalize_noise)
    )
    return Population(
        score=v["score"],
        group=v["group"],
        group_count=2,
        outcome=v["outcome"],
        seed=cfg.seed,
        label=label,
    )


def hiring_variables(cfg: DgmConfig) -> dict[str, np.ndarray]:
    """All structural variables of the hiring generator, keyed by name."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n
    age = -35.0 + rng.gamma(10.0, 3.5, n)
    grp = (rng.random(n) < cfg.bias).astype(np.int64)
    g = grp.astype(np.float64)
    edu = -0.5 + sigmoid(-1.0 + 0.5 * g + sigmoid(0.1 * age) + rng.normal(0.0, 0.25, n))
    publications = np.floor(3.5 + 0.2 * age - 0.25 * (1.0 - g) + edu + rng.poisson(2.0, n))
    exp_raw = 0.7 * age + 15.0 - 5.0 * edu - 2.0 * (1.0 - g) + rng.normal(0.0, 3.0, n)
    # experience can never be negative, even when age+15 < 0 makes the upper cap negative
    exp_years = np.clip(exp_raw, 0.0, np.maximum(age + 15.0, 0.0))
    interview = 10.0 * sigmoid(
        -2.5 - 0.3 * (1.0 - g) + 2.0 * edu + 0.2 * exp_years + rng.normal(0.0, 1.0, n)
    )
    score = sigmoid(-4.0 + 0.5 * interview - sigmoid(0.1 * publications) + 0.1 * exp_years + 0.5 * edu)
    outcome = (rng.random(n) < score).astype(np.int64)
    return {
        "age": age,
        "group": grp,
        "education": edu,
        "publications": publications,
        "experience_years": exp_years,
        "interview": interview,
        "score": score,
        "outcome": outcome,
    }


def gen_synthetic_hiring(cfg: DgmConfig) -> Population:
    v = hiring_variables(cfg)
    label = "synthetic_hiring(n=%d,seed=%d,bias=%s)" % (cfg.n, cfg.seed, fmt_float(cfg.bias))
    return Population(
        score=v["score"],
        group=v["group"],
        group_count=2,
        outcome=v["outcome"],
        seed=cfg.seed,
        label=label,
    )


def ingest_csv(path: str) -> Population:
    """Parse a population file: header `score,group[,outcome][,dm_u00..dm_u11]`.

    Group values may be arbitrary strings; they are re-indexed densely (sorted label
    order) and the mapping is kept on Population.group_labels.
    """
    try:
        fh = open(path, "r", newline="", encoding="utf-8")
    except OSError as exc:
        raise SchemaError("cannot open population file %s: %s" % (path, exc)) from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("empty population file %s" % path) from None
        header = [h.strip() for h in header]
        if "score" not in header:
            raise SchemaError("population file missing required `score` column")
        if "group" not in header:
            raise SchemaError("population file missing required `group` column")
        has_dm = [c for c in DM_COLUMNS if c in header]
        if has_dm and len(has_dm) != 4:
            raise SchemaError(
                "per-instance utility columns must appear as all four of %s" % (DM_COLUMNS,)
            )
        col = {name: header.index(name) for name in header}
        scores: list[float] = []
        raw_groups: list[str] = []
        outcomes: list[int] = []
        has_outcome = "outcome" in header
        dm_rows: list[tuple[float, float, float, float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                s = float(row[col["score"]])
            except (ValueError, IndexError):
                raise RowError("line %d: unparseable score" % lineno) from None
            if not (0.0 <= s <= 1.0):
                raise RowError("line %d: score %s outside [0, 1]" % (lineno, row[col["score"]]))
            scores.append(s)
            raw_groups.append(row[col["group"]].strip())
            if has_outcome:
                val = row[col["outcome"]].strip()
                if val not in ("0", "1"):
                    raise RowError("line %d: outcome must be 0 or 1" % lineno)
                outcomes.append(int(val))
            if has_dm:
                try:
                    dm_rows.append(tuple(float(row[col[c]]) for c in DM_COLUMNS))
                except (ValueError, IndexError):
                    raise RowError("line %d: unparseable utility entries" % lineno) from None
    if not scores:
        raise SchemaError("population file %s has no data rows" % path)
    labels = sorted(set(raw_groups))
    index = {lab: i for i, lab in enumerate(labels)}
    groups = np.array([index[g] for g in raw_groups], dtype=np.int64)
    return Population(
        score=np.array(scores, dtype=np.float64),
        group=groups,
        group_count=len(labels),
        outcome=np.array(outcomes, dtype=np.int64) if has_outcome else None,
        dm_entries=np.array(dm_rows, dtype=np.float64) if has_dm else None,
        label="csv:%s" % path,
        group_labels=tuple(labels),
    )


def export_csv(pop: Population, path: str) -> None:
    """Write a population file mirroring the ingest schema exactly."""
    header = ["score", "group"]
    if pop.outcome is not None:
        header.append("outcome")
    if pop.dm_entries is not None:
        header.extend(DM_COLUMNS)
    labels = pop.group_labels
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i in range(pop.n):
            g = int(pop.group[i])
            row = [fmt_float(pop.score[i]), labels[g] if labels is not None else str(g)]
            if pop.outcome is not None:
                row.append(str(int(pop.outcome[i])))
            if pop.dm_entries is not None:
                row.extend(fmt_float(v) for v in pop.dm_entries[i])
            writer.writerow(row)


def split(pop: Population, train_fraction: float, seed: int) -> tuple[Population, Population]:
    """Group-stratified disjoint split, reproducible for a given seed."""
    if not (0.0 < train_fraction < 1.0):
        raise ConfigError("train_fraction must lie strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    train_idx: list[np.ndarray] = []
    test_idx: list[np.ndarray] = []
    for g in range(pop.group_count):
        members = pop.group_indices[g]
        take = int(math.floor(members.size * train_fraction + 0.5))
        if take <= 0 or take >= members.size:
            raise SplitError(
                "split with fraction %s would empty group %d in one half" % (train_fraction, g)
            )
        perm = rng.permutation(members)
        train_idx.append(perm[:take])
        test_idx.append(perm[take:])
    train_sel = np.sort(np.concatenate(train_idx))
    test_sel = np.sort(np.concatenate(test_idx))
    return _take(pop, train_sel, "train"), _take(pop, test_sel, "test")


def _take(pop: Population, sel: np.ndarray, tag: str) -> Population:
    return Population(
        score=pop.score[sel],
        group=pop.group[sel],
        group_count=pop.group_count,
        outcome=None if pop.outcome is None else pop.outcome[sel],
        dm_entries=None if pop.dm_entries is None else pop.dm_entries[sel],
        seed=pop.seed,
        label="%s/%s" % (pop.label, tag),
        group_labels=pop.group_labels,
    )
