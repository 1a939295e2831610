"""Bi-objective machinery: Pareto fronts, hypervolume, anchors, fairness gain,
and projection of predictive-optimal policies into utility space.

Every front lives in one canonical orientation: x is a performance scalar to
maximize, y an unfairness scalar to minimize. Egalitarian inequality enters as-is;
rawlsian worst-group utility enters negated. The adapter lives at the boundary
(see stakeholders.unfairness) so the geometry here never branches on justice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .errors import AnchorError, ConfigError, GainUndefinedError
from .population import Population
from .stakeholders import StakeholderSpec, eval_utilities, unfairness

SPACE_UTILITY = "utility"
SPACE_PREDICTIVE = "predictive"

# Relative nadir push used to place the hypervolume reference point, and the
# absolute floor applied when a coordinate range is degenerate.
ANCHOR_PUSH_FRACTION = 0.01
ANCHOR_PUSH_MIN = 1e-6

GAIN_SAMPLES_DEFAULT = 512


@dataclass(frozen=True)
class ObjectivePoint:
    x: float
    y: float
    policy_id: str

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ConfigError("objective point coordinates must be finite")


@dataclass(frozen=True)
class Front:
    """Mutually non-dominated points, sorted by performance descending."""

    points: tuple[ObjectivePoint, ...]
    space: str = SPACE_UTILITY
    justice: str = ""
    class_scope: str = ""

    def __post_init__(self) -> None:
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        seen: set[str] = set()
        for i, p in enumerate(pts):
            if p.policy_id in seen:
                raise ConfigError("front contains duplicate policy id %s" % p.policy_id)
            seen.add(p.policy_id)
            if i > 0:
                if not (p.x < pts[i - 1].x):
                    raise ConfigError("front x coordinates must be strictly decreasing")
                if not (p.y < pts[i - 1].y):
                    raise ConfigError("front y coordinates must be strictly decreasing")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def xs(self) -> np.ndarray:
        return np.array([p.x for p in self.points], dtype=np.float64)

    @property
    def ys(self) -> np.ndarray:
        return np.array([p.y for p in self.points], dtype=np.float64)

    def policy_ids(self) -> tuple[str, ...]:
        return tuple(p.policy_id for p in self.points)


def pareto_front(
    points,
    space: str = SPACE_UTILITY,
    justice: str = "",
    class_scope: str = "",
) -> Front:
    """Non-dominated set under (maximize x, minimize y).

    Sort by performance descending (unfairness ascending within ties), then keep a
    point iff its unfairness is strictly below everything kept so far. The strict
    comparison makes exact duplicates and equal-performance ties collapse to the
    single fairest representative.
    """
    pts = list(points)
    if not pts:
        raise ConfigError("pareto_front needs at least one point")
    x = np.array([p.x for p in pts], dtype=np.float64)
    y = np.array([p.y for p in pts], dtype=np.float64)
    order = np.lexsort((y, -x))
    ys_sorted = y[order]
    keep = np.empty(order.size, dtype=bool)
    keep[0] = True
    if order.size > 1:
        prefix_min = np.minimum.accumulate(ys_sorted)
        keep[1:] = ys_sorted[1:] < prefix_min[:-1]
    kept = [pts[i] for i in order[keep]]
    return Front(points=tuple(kept), space=space, justice=justice, class_scope=class_scope)


def hypervolume(front: Front, reference) -> float:
    """Area dominated by the front relative to a reference corner.

    Step-stair sum over points in performance-descending order: each point
    contributes a rectangle of width (x_i - r_x); the first rectangle spans down
    from r_y, later ones from the previous point's unfairness.
    """
    r_x, r_y = float(reference[0]), float(reference[1])
    if len(front) == 0:
        return 0.0
    xs = front.xs
    ys = front.ys
    if r_x > float(np.min(xs)) or r_y < float(np.max(ys)):
        raise AnchorError(
            "reference (%r, %r) dominates a front point; it must be weakly worse "
            "than every point" % (r_x, r_y)
        )
    y_next = np.concatenate(([r_y], ys[:-1]))
    return float(np.sum((xs - r_x) * (y_next - ys)))


@dataclass(frozen=True)
class Anchors:
    utopia: tuple[float, float]
    nadir: tuple[float, float]
    reference: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "utopia": list(self.utopia),
            "nadir": list(self.nadir),
            "reference": list(self.reference),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Anchors":
        try:
            return cls(
                utopia=(float(d["utopia"][0]), float(d["utopia"][1])),
                nadir=(float(d["nadir"][0]), float(d["nadir"][1])),
                reference=(float(d["reference"][0]), float(d["reference"][1])),
            )
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ConfigError("malformed anchors record: %s" % exc) from exc


def anchors(fronts) -> Anchors:
    """Shared extreme points over the union of the supplied fronts.

    The reference corner is the nadir pushed away from the utopia by 1% of each
    coordinate range, with an absolute floor so degenerate ranges still yield a
    strictly worse reference.
    """
    xs: list[float] = []
    ys: list[float] = []
    for f in fronts:
        for p in f.points:
            xs.append(p.x)
            ys.append(p.y)
    if not xs:
        raise ConfigError("anchors need at least one non-empty front")
    ux, nx = max(xs), min(xs)
    uy, ny = min(ys), max(ys)
    push_x = max(ANCHOR_PUSH_FRACTION * (ux - nx), ANCHOR_PUSH_MIN)
    push_y = max(ANCHOR_PUSH_FRACTION * (ny - uy), ANCHOR_PUSH_MIN)
    return Anchors(
        utopia=(ux, uy),
        nadir=(nx, ny),
        reference=(nx - push_x, ny + push_y),
    )


def nhv(front: Front, anchor_set: Anchors) -> float:
    """Hypervolume normalized by the utopia-reference rectangle, in [0, 1]."""
    r_x, r_y = anchor_set.reference
    u_x, u_y = anchor_set.utopia
    hv_max = (u_x - r_x) * (r_y - u_y)
    if hv_max == 0.0:
        raise AnchorError("degenerate anchors: utopia-reference rectangle has zero area")
    value = hypervolume(front, anchor_set.reference) / hv_max
    if value > 1.0:
        if value <= 1.0 + 1e-12:
            return 1.0
        raise AnchorError(
            "normalized hypervolume %r exceeds 1; anchors do not cover the front" % value
        )
    return value


@dataclass(frozen=True)
class GainCurve:
    x: np.ndarray
    delta: np.ndarray


def _fairness_envelope(front: Front):
    """Front as a piecewise-linear fairness curve over ascending performance.

    Fairness is the negated canonical unfairness, so higher is fairer for both
    justice functionals.
    """
    xs = front.xs[::-1]
    fair = -front.ys[::-1]
    return xs, fair


def fairness_gain(front_a: Front, front_b: Front, samples: int = GAIN_SAMPLES_DEFAULT):
    """Pointwise fairness advantage of front_b over front_a, plus its area.

    Both envelopes are restricted to the intersection of their performance ranges
    and linearly interpolated on the union of breakpoints plus `samples` uniform
    grid values; the area under the difference uses the trapezoid rule. Linear
    interpolation between breakpoints can dip locally negative even when front_b
    weakly dominates at every one of its own breakpoints.
    """
    if len(front_a) == 0 or len(front_b) == 0:
        raise ConfigError("fairness_gain needs two non-empty fronts")
    if samples < 2:
        raise ConfigError("samples must be >= 2")
    xa, fa = _fairness_envelope(front_a)
    xb, fb = _fairness_envelope(front_b)
    lo = max(float(xa[0]), float(xb[0]))
    hi = min(float(xa[-1]), float(xb[-1]))
    if lo > hi:
        raise GainUndefinedError(
            "fronts share no performance range (intersection [%r, %r] is empty)" % (lo, hi)
        )
    breakpoints = np.concatenate(
        (
            xa[(xa >= lo) & (xa <= hi)],
            xb[(xb >= lo) & (xb <= hi)],
            np.linspace(lo, hi, samples),
        )
    )
    grid = np.unique(breakpoints)
    env_a = np.interp(grid, xa, fa)
    env_b = np.interp(grid, xb, fb)
    delta = env_b - env_a
    if grid.size > 1:
        auc = float(np.sum((delta[1:] + delta[:-1]) * 0.5 * np.diff(grid)))
    else:
        auc = 0.0
    return GainCurve(x=grid, delta=delta), auc


def project(
    predictive_front: Front,
    pop: Population,
    spec: StakeholderSpec,
    policies: Mapping[str, object],
) -> Front:
    """Image of predictive-optimal policies in utility space, re-filtered.

    Each policy on the predictive front is re-evaluated under the stakeholder
    utilities with its parameters fixed; the resulting utility-space points are
    passed through pareto_front again.
    """
    pts: list[ObjectivePoint] = []
    for p in predictive_front.points:
        policy = policies.get(p.policy_id)
        if policy is None:
            raise ConfigError("unresolvable policy id %s on predictive front" % p.policy_id)
        uv = eval_utilities(pop, policy, spec)
        pts.append(ObjectivePoint(x=uv.u_dm, y=unfairness(uv, spec.justice), policy_id=p.policy_id))
    return pareto_front(
        pts,
        space=SPACE_UTILITY,
        justice=spec.justice,
        class_scope=predictive_front.class_scope,
    )
