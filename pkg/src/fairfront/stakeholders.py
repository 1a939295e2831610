"""Stakeholder utilities and justice functionals.

Evaluates a policy's expected utility for the decision maker and for each group of
decision subjects, then aggregates the per-group values into a social-planner
objective (egalitarian inequality or rawlsian worst-group utility). Everything is
an exact expectation over the population; nothing is sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .population import Population

JUSTICE_EGALITARIAN = "egalitarian"
JUSTICE_RAWLSIAN = "rawlsian"
JUSTICES = (JUSTICE_EGALITARIAN, JUSTICE_RAWLSIAN)

MODE_PROBABILISTIC = "probabilistic"
MODE_EMPIRICAL = "empirical"
EVAL_MODES = (MODE_PROBABILISTIC, MODE_EMPIRICAL)


@dataclass(frozen=True)
class UtilityMatrix:
    """Signed utilities indexed by (decision, outcome): u<decision><outcome>."""

    u00: float
    u01: float
    u10: float
    u11: float

    def __post_init__(self) -> None:
        for name in ("u00", "u01", "u10", "u11"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError("utility entry %s must be finite" % name)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.u00, self.u01, self.u10, self.u11)

    def scaled(self, k: float) -> "UtilityMatrix":
        return UtilityMatrix(k * self.u00, k * self.u01, k * self.u10, k * self.u11)


def from_cost_form(c00: float, c01: float, c10: float, c11: float) -> UtilityMatrix:
    """Map cost-form constants (explicit minus signs on the off-diagonal error
    terms) to the signed convention used everywhere else."""
    for v in (c00, c01, c10, c11):
        if not math.isfinite(v):
            raise ConfigError("cost-form entries must be finite")
    return UtilityMatrix(u00=c00, u01=-c01, u10=-c10, u11=c11)


# Lending scenario: interest earned on a repaid loan vs principal lost on default,
# strongly asymmetric for the decision maker.
CREDIT_DM = UtilityMatrix(u00=0.0, u01=0.0, u10=-0.4431, u11=28.5473)
CREDIT_DS = UtilityMatrix(u00=0.0, u01=-1.0, u10=-5.0, u11=10.0)

# Hiring scenario: the employer keeps a small positive margin even on a bad hire.
HIRING_DM = UtilityMatrix(u00=0.0, u01=0.0, u10=2.5, u11=50.0)
HIRING_DS = UtilityMatrix(u00=0.0, u01=0.0, u10=-4.0, u11=8.0)


@dataclass(frozen=True)
class StakeholderSpec:
    """Who gets which utilities and how per-group values aggregate.

    dm=None marks per-instance decision-maker entries carried on the population
    records; per-instance entries take precedence over a constant matrix whenever
    the population carries them.
    """

    dm: UtilityMatrix | None
    ds: tuple[UtilityMatrix, ...]
    justice: str = JUSTICE_EGALITARIAN
    eval_mode: str = MODE_PROBABILISTIC

    def __post_init__(self) -> None:
        if len(self.ds) < 1:
            raise ConfigError("spec needs at least one decision-subject matrix")
        if self.justice not in JUSTICES:
            raise ConfigError("unknown justice %r (expected one of %s)" % (self.justice, JUSTICES))
        if self.eval_mode not in EVAL_MODES:
            raise ConfigError(
                "unknown eval_mode %r (expected one of %s)" % (self.eval_mode, EVAL_MODES)
            )


def uniform_ds(matrix: UtilityMatrix, group_count: int) -> tuple[UtilityMatrix, ...]:
    return (matrix,) * group_count


def credit_spec(
    justice: str = JUSTICE_EGALITARIAN,
    eval_mode: str = MODE_PROBABILISTIC,
    group_count: int = 2,
) -> StakeholderSpec:
    return StakeholderSpec(
        dm=CREDIT_DM, ds=uniform_ds(CREDIT_DS, group_count), justice=justice, eval_mode=eval_mode
    )


def hiring_spec(
    justice: str = JUSTICE_EGALITARIAN,
    eval_mode: str = MODE_PROBABILISTIC,
    group_count: int = 2,
) -> StakeholderSpec:
    return StakeholderSpec(
        dm=HIRING_DM, ds=uniform_ds(HIRING_DS, group_count), justice=justice, eval_mode=eval_mode
    )


@dataclass(frozen=True)
class UtilityVector:
    u_dm: float
    u_ds: tuple[float, ...]
    u_sp_egal: float
    u_sp_rawls: float


def egalitarian(u_ds) -> float:
    """Total inequality: sum of |U^s - U^s'| over unordered group pairs."""
    vals = [float(v) for v in u_ds]
    if len(vals) < 1:
        raise ConfigError("egalitarian needs at least one group utility")
    total = 0.0
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            total += abs(vals[i] - vals[j])
    return total


def rawlsian(u_ds) -> float:
    """Worst-group utility."""
    vals = [float(v) for v in u_ds]
    if len(vals) < 1:
        raise ConfigError("rawlsian needs at least one group utility")
    return min(vals)


def unfairness(uv: UtilityVector, justice: str) -> float:
    """Minimized-orientation social objective: inequality as-is, worst-group
    utility negated."""
    if justice == JUSTICE_EGALITARIAN:
        return uv.u_sp_egal
    if justice == JUSTICE_RAWLSIAN:
        return -uv.u_sp_rawls
    raise ConfigError("unknown justice %r" % (justice,))


def positive_weights(pop: Population, eval_mode: str) -> np.ndarray:
    """Per-individual probability mass on the positive outcome."""
    if eval_mode == MODE_PROBABILISTIC:
        return pop.score
    if eval_mode == MODE_EMPIRICAL:
        return pop.require_outcomes().astype(np.float64)
    raise ConfigError("unknown eval_mode %r" % (eval_mode,))


def dm_weight_arrays(pop: Population, spec: StakeholderSpec, pos: np.ndarray):
    """Per-individual decision-maker payoff under accept and under reject."""
    neg = 1.0 - pos
    if pop.dm_entries is not None:
        acc = pos * pop.dm_entries[:, 3] + neg * pop.dm_entries[:, 2]
        rej = pos * pop.dm_entries[:, 1] + neg * pop.dm_entries[:, 0]
        return acc, rej
    if spec.dm is None:
        raise ConfigError(
            "spec requests per-instance decision-maker entries but the population has none"
        )
    acc = pos * spec.dm.u11 + neg * spec.dm.u10
    rej = pos * spec.dm.u01 + neg * spec.dm.u00
    return acc, rej


def ds_weight_arrays(matrix: UtilityMatrix, pos: np.ndarray):
    neg = 1.0 - pos
    acc = pos * matrix.u11 + neg * matrix.u10
    rej = pos * matrix.u01 + neg * matrix.u00
    return acc, rej


def eval_utilities(pop: Population, policy, spec: StakeholderSpec) -> UtilityVector:
    """Exact expected utilities of one policy for every stakeholder.

    Accumulation runs group by group in ascending group order so that results are
    bit-identical to the chunked sweep evaluator.
    """
    if len(spec.ds) != pop.group_count:
        raise ConfigError(
            "spec has %d decision-subject matrices but population has %d groups"
            % (len(spec.ds), pop.group_count)
        )
    a = policy.acceptance(pop)
    pos = positive_weights(pop, spec.eval_mode)
    dm_acc, dm_rej = dm_weight_arrays(pop, spec, pos)
    dm_contrib = a * dm_acc + (1.0 - a) * dm_rej
    dm_total = 0.0
    u_ds: list[float] = []
    for g in range(pop.group_count):
        idx = pop.group_indices[g]
        dm_total = dm_total + float(np.sum(dm_contrib[idx]))
        ds_acc, ds_rej = ds_weight_arrays(spec.ds[g], pos[idx])
        ag = a[idx]
        ds_contrib = ag * ds_acc + (1.0 - ag) * ds_rej
        u_ds.append(float(np.sum(ds_contrib)) / idx.size)
    u_dm = dm_total / pop.n
    return UtilityVector(
        u_dm=u_dm,
        u_ds=tuple(u_ds),
        u_sp_egal=egalitarian(u_ds),
        u_sp_rawls=rawlsian(u_ds),
    )
