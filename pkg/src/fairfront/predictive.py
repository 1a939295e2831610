"""Predictive-space objectives: accuracy and equality-of-opportunity disparity.

Stochastic policies contribute expected acceptance probabilities, never Bernoulli
samples, so both metrics are deterministic functions of (population, policy).
"""

from __future__ import annotations

import numpy as np

from .errors import MetricUndefinedError
from .population import Population
from .stakeholders import MODE_PROBABILISTIC, positive_weights


def accuracy(pop: Population, policy, eval_mode: str = MODE_PROBABILISTIC) -> float:
    """Expected fraction of correct decisions.

    Group-ascending accumulation keeps the value bit-identical to the sweep
    evaluator's chunked path.
    """
    a = policy.acceptance(pop)
    pos = positive_weights(pop, eval_mode)
    contrib = a * pos + (1.0 - a) * (1.0 - pos)
    total = 0.0
    for g in range(pop.group_count):
        idx = pop.group_indices[g]
        total = total + float(np.sum(contrib[idx]))
    return total / pop.n


def group_tprs(pop: Population, policy, eval_mode: str = MODE_PROBABILISTIC) -> tuple[float, ...]:
    """Per-group expected true-positive rates (expected acceptance among positives)."""
    a = policy.acceptance(pop)
    pos = positive_weights(pop, eval_mode)
    tprs: list[float] = []
    for g in range(pop.group_count):
        idx = pop.group_indices[g]
        denom = float(np.sum(pos[idx]))
        if denom == 0.0:
            raise MetricUndefinedError(
                "group %d has no positive mass; equality-of-opportunity is undefined" % g
            )
        tprs.append(float(np.sum(a[idx] * pos[idx])) / denom)
    return tuple(tprs)


def eo_disparity(pop: Population, policy, eval_mode: str = MODE_PROBABILISTIC) -> float:
    """Largest pairwise gap in group-conditional true-positive rates."""
    tprs = group_tprs(pop, policy, eval_mode)
    return max(tprs) - min(tprs)
