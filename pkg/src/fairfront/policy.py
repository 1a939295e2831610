"""Decision policies over scored populations, plus grid enumeration.

A policy maps each individual to an acceptance probability from their score (and
group, when parameters are group-specific). Parameter tuples of length 1 apply to
everyone; tuples of length G give group g its own entry.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .canonical import stable_digest
from .errors import ConfigError
from .numerics import sigmoid
from .population import Population

# Finite stand-in for an infinitely sharp logistic; at grid resolution it is
# saturated to machine precision everywhere except exactly at the offset.
BETA_HARD = 1e6

DEFAULT_BETAS = (BETA_HARD, 500.0, 100.0, 50.0, 30.0, 10.0, 5.0, 2.0, 1.0, 0.5)

SCOPE_SHARED = "shared"
SCOPE_GROUP = "group_specific"


def _scope_of(length: int) -> str:
    return SCOPE_SHARED if length == 1 else SCOPE_GROUP


def _expand(params: tuple[float, ...], pop: Population) -> np.ndarray:
    if len(params) == 1:
        return np.full(pop.n, params[0])
    if len(params) != pop.group_count:
        raise ConfigError(
            "policy has %d group parameters but population has %d groups"
            % (len(params), pop.group_count)
        )
    return np.asarray(params, dtype=np.float64)[pop.group]


@dataclass(frozen=True)
class DeterministicPolicy:
    """Hard threshold rule: accept iff score >= threshold (ties accept)."""

    thresholds: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.thresholds) < 1:
            raise ConfigError("deterministic policy needs at least one threshold")
        for t in self.thresholds:
            if not (0.0 <= t <= 1.0):
                raise ConfigError("threshold %r outside [0, 1]" % (t,))

    @property
    def scope(self) -> str:
        return _scope_of(len(self.thresholds))

    @property
    def kind(self) -> str:
        return "deterministic"

    def acceptance(self, pop: Population) -> np.ndarray:
        tau = _expand(self.thresholds, pop)
        return (pop.score >= tau).astype(np.float64)

    def descriptor(self) -> dict:
        return {"kind": self.kind, "thresholds": list(self.thresholds)}

    @property
    def policy_id(self) -> str:
        return stable_digest(self.descriptor())


@dataclass(frozen=True)
class StochasticPolicy:
    """Smooth threshold rule: accept with probability sigmoid(beta*(score-gamma))."""

    betas: tuple[float, ...]
    gammas: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.betas) != len(self.gammas):
            raise ConfigError("betas and gammas must have equal length")
        if len(self.betas) < 1:
            raise ConfigError("stochastic policy needs at least one (beta, gamma) pair")
        for b in self.betas:
            if not b > 0.0:
                raise ConfigError("beta %r must be positive" % (b,))
        for g in self.gammas:
            if not (0.0 <= g <= 1.0):
                raise ConfigError("gamma %r outside [0, 1]" % (g,))

    @property
    def scope(self) -> str:
        return _scope_of(len(self.betas))

    @property
    def kind(self) -> str:
        return "stochastic"

    def acceptance(self, pop: Population) -> np.ndarray:
        beta = _expand(self.betas, pop)
        gamma = _expand(self.gammas, pop)
        return sigmoid(beta * (pop.score - gamma))

    def descriptor(self) -> dict:
        return {"kind": self.kind, "betas": list(self.betas), "gammas": list(self.gammas)}

    @property
    def policy_id(self) -> str:
        return stable_digest(self.descriptor())


@dataclass(frozen=True)
class MixturePolicy:
    """Convex blend of two policies: lam * left + (1 - lam) * right, pointwise."""

    left: "Policy"
    right: "Policy"
    lam: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.lam <= 1.0):
            raise ConfigError("mixture weight %r outside [0, 1]" % (self.lam,))

    @property
    def scope(self) -> str:
        return SCOPE_SHARED if self.left.scope == self.right.scope == SCOPE_SHARED else SCOPE_GROUP

    @property
    def kind(self) -> str:
        return "mixture"

    def acceptance(self, pop: Population) -> np.ndarray:
        return self.lam * self.left.acceptance(pop) + (1.0 - self.lam) * self.right.acceptance(pop)

    def descriptor(self) -> dict:
        return {
            "kind": self.kind,
            "lambda": self.lam,
            "left": self.left.descriptor(),
            "right": self.right.descriptor(),
        }

    @property
    def policy_id(self) -> str:
        return stable_digest(self.descriptor())


Policy = DeterministicPolicy | StochasticPolicy | MixturePolicy


def policy_from_descriptor(d: dict) -> Policy:
    """Inverse of Policy.descriptor, for payloads and persisted tables."""
    if not isinstance(d, dict) or "kind" not in d:
        raise ConfigError("policy descriptor must be an object with a `kind` field")
    kind = d["kind"]
    try:
        if kind == "deterministic":
            return DeterministicPolicy(tuple(float(t) for t in d["thresholds"]))
        if kind == "stochastic":
            return StochasticPolicy(
                tuple(float(b) for b in d["betas"]),
                tuple(float(g) for g in d["gammas"]),
            )
        if kind == "mixture":
            return MixturePolicy(
                policy_from_descriptor(d["left"]),
                policy_from_descriptor(d["right"]),
                float(d["lambda"]),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("malformed %s policy descriptor: %s" % (kind, exc)) from exc
    raise ConfigError("unknown policy kind %r" % (kind,))


@dataclass(frozen=True)
class GridSpec:
    """Enumeration grid for the two parametric policy classes.

    Group-specific deterministic grids cross thresholds over groups. Group-specific
    stochastic grids pair one sharpness across all groups by default; setting
    full_group_cross crosses (beta, gamma) pairs over groups instead.
    """

    threshold_count: int = 100
    threshold_lo: float = 0.01
    threshold_hi: float = 0.99
    betas: tuple[float, ...] = DEFAULT_BETAS
    full_group_cross: bool = False

    def validate(self) -> None:
        problems = []
        if self.threshold_count < 1:
            problems.append("threshold_count must be >= 1")
        if not (0.0 <= self.threshold_lo <= self.threshold_hi <= 1.0):
            problems.append("threshold bounds must satisfy 0 <= lo <= hi <= 1")
        if len(self.betas) < 1:
            problems.append("betas must be non-empty")
        if any(b <= 0.0 for b in self.betas):
            problems.append("betas must be positive")
        if problems:
            raise ConfigError("; ".join(problems))

    def threshold_values(self) -> np.ndarray:
        self.validate()
        return np.linspace(self.threshold_lo, self.threshold_hi, self.threshold_count)

    def policy_count(self, kind: str, scope: str, group_count: int) -> int:
        """Grid size without materializing anything (used for cap checks)."""
        self.validate()
        t = self.threshold_count
        b = len(self.betas)
        if scope not in (SCOPE_SHARED, SCOPE_GROUP):
            raise ConfigError("unknown scope %r" % (scope,))
        g = 1 if scope == SCOPE_SHARED else group_count
        if kind == "deterministic":
            return t**g
        if kind == "stochastic":
            if scope == SCOPE_GROUP and self.full_group_cross:
                return (b * t) ** g
            return b * t**g
        raise ConfigError("unknown policy kind %r" % (kind,))

    def enumerate_policies(self, kind: str, scope: str, group_count: int) -> list[Policy]:
        """Materialize the grid in a fixed, documented order.

        Deterministic: thresholds ascending, group 0 outermost.
        Stochastic (paired): betas in declared order, then threshold blocks as above.
        Stochastic (full cross): per-group (beta, gamma) pairs, group 0 outermost.
        """
        ts = [float(v) for v in self.threshold_values()]
        g = 1 if scope == SCOPE_SHARED else group_count
        if scope == SCOPE_GROUP and group_count < 2:
            raise ConfigError("group_specific grids need at least two groups")
        if kind == "deterministic":
            return [
                DeterministicPolicy(combo) for combo in itertools.product(ts, repeat=g)
            ]
        if kind == "stochastic":
            if scope == SCOPE_GROUP and self.full_group_cross:
                pairs = [(float(b), t) for b in self.betas for t in ts]
                out: list[Policy] = []
                for combo in itertools.product(pairs, repeat=g):
                    out.append(
                        StochasticPolicy(
                            tuple(p[0] for p in combo), tuple(p[1] for p in combo)
                        )
                    )
                return out
            out = []
            for b in self.betas:
                for combo in itertools.product(ts, repeat=g):
                    out.append(StochasticPolicy((float(b),) * g, combo))
            return out
        raise ConfigError("unknown policy kind %r" % (kind,))
