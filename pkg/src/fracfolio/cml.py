"""Common-tangent construction between low-risk and high-efficiency frontiers.

The low-risk portfolio cloud plays the role of the risk-free asset: a
straight line tangent to both clouds' upper concave envelopes bounds
every attainable portfolio from above, and points along the segment mix
the two tangency portfolios in proportion to the allocation fraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, TangencyError
from .portfolio import PortfolioWeights

Point = tuple[float, float]  # (risk, return)

# A candidate line supports a frontier when no point sits above it by more
# than this (absolute, in return units); the certificate reported in
# TangentResult is the exact measured clearance.
_SUPPORT_TOL = 1e-12


def _staircase(points: Sequence[Point]) -> list[Point]:
    """Pareto-maximal (min risk, max return) subset, risk-ascending."""
    ordered = sorted(points, key=lambda p: (p[0], -p[1]))
    out: list[Point] = []
    best = -float("inf")
    for p in ordered:
        if p[1] > best:
            out.append(p)
            best = p[1]
    return out


def _cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def upper_frontier(points: Sequence[Point]) -> list[Point]:
    """Upper concave envelope of the non-dominated boundary of a cloud.

    First reduces to the Pareto staircase, then drops points lying below
    the segment joining their neighbours so tangency is well defined.
    Sorted by ascending risk.
    """
    if not points:
        raise DomainError("upper_frontier needs at least one point")
    stairs = _staircase(points)
    hull: list[Point] = []
    for p in stairs:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0.0:
            hull.pop()
        hull.append(p)
    return hull


def line_clearance(points: Sequence[Point], low: Point, high: Point) -> float:
    """Max signed elevation of any point above the line through low/high.

    Negative values mean every point sits strictly below the line.
    """
    slope = (high[1] - low[1]) / (high[0] - low[0])
    return max(p[1] - (low[1] + slope * (p[0] - low[0])) for p in points)


@dataclass(frozen=True)
class TangentResult:
    """The common supporting line of the two frontiers.

    The clearances certify validity: the largest signed elevation of each
    input frontier above the line (at most ~0 for a true tangent).
    """

    low_risk: float
    low_return: float
    high_risk: float
    high_return: float
    slope: float
    low_clearance: float
    high_clearance: float
    low_weights: PortfolioWeights | None = None
    high_weights: PortfolioWeights | None = None

    @property
    def low_point(self) -> Point:
        return (self.low_risk, self.low_return)

    @property
    def high_point(self) -> Point:
        return (self.high_risk, self.high_return)


def common_tangent(low_front: Sequence[Point], high_front: Sequence[Point],
                   low_weights: Sequence[PortfolioWeights] | None = None,
                   high_weights: Sequence[PortfolioWeights] | None = None) -> TangentResult:
    """Supporting line touching both frontiers, ascending left to right.

    Searches all pairs (L in low, H in high) with risk_L < risk_H and
    return_L < return_H for the line leaving no point of either frontier
    above it; on concave envelopes such a pair exists whenever the high
    frontier reaches beyond the low one. Ties break toward the steeper
    slope, then the lower-risk low point.
    """
    if not low_front or not high_front:
        raise TangencyError("both frontiers must be nonempty")
    if max(p[1] for p in high_front) <= max(p[1] for p in low_front):
        raise TangencyError("high frontier does not exceed the low frontier's return")

    scale = max(1.0, max(abs(p[1]) for p in low_front),
                max(abs(p[1]) for p in high_front))
    best = None
    best_key = None
    for i, lo in enumerate(low_front):
        for j, hi in enumerate(high_front):
            if not (lo[0] < hi[0] and lo[1] < hi[1]):
                continue
            cl_low = line_clearance(low_front, lo, hi)
            cl_high = line_clearance(high_front, lo, hi)
            if max(cl_low, cl_high) > _SUPPORT_TOL * scale:
                continue
            slope = (hi[1] - lo[1]) / (hi[0] - lo[0])
            key = (-slope, lo[0], hi[0])
            if best_key is None or key < best_key:
                best_key = key
                best = (i, j, lo, hi, slope, cl_low, cl_high)
    if best is None:
        raise TangencyError("no supporting line found: high frontier is dominated")
    i, j, lo, hi, slope, cl_low, cl_high = best
    return TangentResult(
        low_risk=lo[0], low_return=lo[1],
        high_risk=hi[0], high_return=hi[1],
        slope=slope, low_clearance=cl_low, high_clearance=cl_high,
        low_weights=low_weights[i] if low_weights is not None else None,
        high_weights=high_weights[j] if high_weights is not None else None,
    )


def _combined_weights(tangent: TangentResult, lam: float) -> PortfolioWeights | None:
    if tangent.low_weights is None or tangent.high_weights is None:
        return None
    ids = tangent.low_weights.design_ids + tangent.high_weights.design_ids
    weights = tuple(lam * w for w in tangent.low_weights.weights) + \
        tuple((1.0 - lam) * w for w in tangent.high_weights.weights)
    return PortfolioWeights(ids, weights)


def combination_point(tangent: TangentResult, lam: float):
    """Mix of the two tangency portfolios with fraction ``lam`` on the low-risk side.

    Returns ((risk, return), combined weights); both coordinates are
    exactly linear in lam along the tangent segment.
    """
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda {lam!r} outside [0, 1]")
    risk = lam * tangent.low_risk + (1.0 - lam) * tangent.high_risk
    ret = lam * tangent.low_return + (1.0 - lam) * tangent.high_return
    return (risk, ret), _combined_weights(tangent, lam)


def combination_for_target(tangent: TangentResult, max_risk: float | None = None,
                           min_return: float | None = None):
    """The unique combination meeting a risk cap or return floor exactly.

    Returns (lambda, (risk, return), combined weights).
    """
    if (max_risk is None) == (min_return is None):
        raise DomainError("specify exactly one of max_risk or min_return")
    if max_risk is not None:
        if not tangent.low_risk <= max_risk <= tangent.high_risk:
            raise DomainError(f"risk target {max_risk!r} outside the tangent span")
        lam = (tangent.high_risk - max_risk) / (tangent.high_risk - tangent.low_risk)
    else:
        if not tangent.low_return <= min_return <= tangent.high_return:
            raise DomainError(f"return target {min_return!r} outside the tangent span")
        lam = (tangent.high_return - min_return) / (tangent.high_return - tangent.low_return)
    point, weights = combination_point(tangent, lam)
    return lam, point, weights
