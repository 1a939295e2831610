"""Regime analysis: when do stochastic policies beat deterministic ones?

Two constants of the decision-maker matrix drive the predictions: the asymmetry
between the payoff of a good and a bad positive decision, and the alignment of
decision-maker and per-group decision-subject utilities. Curvature violations on
observed deterministic fronts provide the matching empirical evidence: wherever
the front fails the required curvature, a mixture of the neighboring policies
lands strictly inside the dominated region, so randomization expands the front.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError
from .moo import Front, ObjectivePoint
from .stakeholders import JUSTICE_EGALITARIAN, StakeholderSpec, UtilityMatrix

KIND_CONVEX = "convex"
KIND_CONCAVE = "concave"
HULL_LOWER_CONVEX = "lower_convex"
HULL_UPPER_CONCAVE = "upper_concave"

PREDICT_GAIN = "gain"
PREDICT_NO_GAIN = "no_gain"

CURVATURE_TOL_REL = 1e-9


@dataclass(frozen=True)
class RegimeReport:
    asymmetry_ratio: float
    alignments: tuple[float, ...]
    egal_prediction: str
    rawls_prediction: str
    curvature_violations: tuple[tuple[int, ...], ...]


def alignment(dm: UtilityMatrix, ds: UtilityMatrix) -> float:
    """Inner product of the two utility matrices as 4-entry vectors."""
    return dm.u00 * ds.u00 + dm.u01 * ds.u01 + dm.u10 * ds.u10 + dm.u11 * ds.u11


def asymmetry_ratio(dm: UtilityMatrix) -> float:
    """|payoff of accepting a positive| over |payoff of accepting a negative|.

    A zero denominator is reported as +inf, which is a legal (maximally
    asymmetric) value rather than an error.
    """
    if dm.u10 == 0.0:
        return math.inf
    return abs(dm.u11) / abs(dm.u10)


def _oriented_xy(front: Front, convex: bool):
    """Front coordinates in ascending-x order, in the orientation being checked.

    The convex check inspects (performance, unfairness) as stored. The concave
    check inspects (performance, welfare) where welfare = -unfairness, recovering
    the utility-valued worst-group axis from the canonical orientation.
    """
    xs = [p.x for p in reversed(front.points)]
    ys = [p.y if convex else -p.y for p in reversed(front.points)]
    return xs, ys


def curvature_violations(front: Front, kind: str) -> list[int]:
    """Indices (in ascending-performance order) where slope monotonicity breaks.

    convex: slopes along the minimized-unfairness curve must be non-decreasing; a
    decrease means the middle point sits above the chord of its neighbors, so the
    chord (a policy mixture) improves on it.
    concave: slopes along the maximized-welfare curve must be non-increasing; an
    increase marks the mirror-image failure.

    Fronts with fewer than three points have no triples and return [].
    """
    if kind not in (KIND_CONVEX, KIND_CONCAVE):
        raise ConfigError("unknown curvature kind %r" % (kind,))
    if len(front) < 3:
        return []
    xs, ys = _oriented_xy(front, convex=(kind == KIND_CONVEX))
    slopes = []
    for i in range(len(xs) - 1):
        dx = xs[i + 1] - xs[i]
        if dx == 0.0:
            raise ConfigError("front has duplicate performance values")
        slopes.append((ys[i + 1] - ys[i]) / dx)
    scale = max((abs(s) for s in slopes), default=0.0)
    tol = CURVATURE_TOL_REL * (scale if scale > 0.0 else 1.0)
    out: list[int] = []
    for i in range(len(slopes) - 1):
        if kind == KIND_CONVEX:
            broken = slopes[i] - slopes[i + 1] > tol
        else:
            broken = slopes[i + 1] - slopes[i] > tol
        if broken:
            out.append(i + 1)
    return out


def _cross(ox: float, oy: float, ax: float, ay: float, bx: float, by: float) -> float:
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def hull(front: Front, kind: str) -> Front:
    """Monotone-chain envelope of the front in the requested direction.

    lower_convex keeps the lower boundary of (performance, unfairness);
    upper_concave the upper boundary of (performance, welfare). Interior and
    collinear points are dropped; the output front has no curvature violations
    and weakly dominates every input point along its piecewise-linear envelope.
    """
    if kind not in (HULL_LOWER_CONVEX, HULL_UPPER_CONCAVE):
        raise ConfigError("unknown hull kind %r" % (kind,))
    if len(front) <= 2:
        return front
    pts = list(reversed(front.points))
    xs, ys = _oriented_xy(front, convex=(kind == HULL_LOWER_CONVEX))
    sign = 1.0 if kind == HULL_LOWER_CONVEX else -1.0
    kept: list[int] = []
    for i in range(len(pts)):
        while (
            len(kept) >= 2
            and sign
            * _cross(
                xs[kept[-2]], ys[kept[-2]], xs[kept[-1]], ys[kept[-1]], xs[i], ys[i]
            )
            <= 0.0
        ):
            kept.pop()
        kept.append(i)
    vertices = tuple(pts[i] for i in reversed(kept))
    return Front(
        points=vertices,
        space=front.space,
        justice=front.justice,
        class_scope=front.class_scope,
    )


def classify_regime(spec: StakeholderSpec, det_fronts) -> RegimeReport:
    """Predict whether randomization expands each justice's front.

    Egalitarian gains require payoff asymmetry (ratio above 1); rawlsian gains
    additionally require the decision maker to be misaligned with at least one
    group. Supplied deterministic fronts contribute curvature violations as
    empirical evidence, one index tuple per front in input order.
    """
    if spec.dm is None:
        raise ConfigError(
            "regime classification needs a constant decision-maker matrix; reduce "
            "per-instance entries to one matrix first"
        )
    ratio = asymmetry_ratio(spec.dm)
    alignments = tuple(alignment(spec.dm, ds) for ds in spec.ds)
    egal_prediction = PREDICT_GAIN if ratio > 1.0 else PREDICT_NO_GAIN
    rawls_prediction = (
        PREDICT_GAIN
        if ratio > 1.0 and any(a < 0.0 for a in alignments)
        else PREDICT_NO_GAIN
    )
    evidence: list[tuple[int, ...]] = []
    for f in det_fronts:
        kind = KIND_CONVEX if f.justice == JUSTICE_EGALITARIAN else KIND_CONCAVE
        evidence.append(tuple(curvature_violations(f, kind)))
    return RegimeReport(
        asymmetry_ratio=ratio,
        alignments=alignments,
        egal_prediction=egal_prediction,
        rawls_prediction=rawls_prediction,
        curvature_violations=tuple(evidence),
    )
