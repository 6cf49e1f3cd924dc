"""Pareto-frontier extraction and design-selection rules.

Designs are scored as (risk, return) points; the frontier holds every
non-dominated point (a dominates b iff return_a >= return_b and
risk_a <= risk_b with at least one strict). Two pickers feed the
portfolio stage: uniform gridding of the frontier's risk range, and the
low-efficiency threshold rule for the repeated-single comparison set.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError, SelectionError


@dataclass(frozen=True)
class ScoredDesign:
    """A design's position in (risk, return) space.

    provenance records which protocol produced the score:
    "deterministic-screen" (within-stage variability as risk) or
    "stochastic" (realization risk).
    """

    design_id: str
    ret: float
    risk: float
    provenance: str = "deterministic-screen"

    def __post_init__(self):
        if self.ret <= 0.0 or self.risk < 0.0:
            raise DomainError("scored design needs ret > 0 and risk >= 0")


def dominates(a: ScoredDesign, b: ScoredDesign) -> bool:
    return (a.ret >= b.ret and a.risk <= b.risk
            and (a.ret > b.ret or a.risk < b.risk))


def pareto_front(points: list[ScoredDesign]) -> list[ScoredDesign]:
    """All non-dominated points, sorted by ascending risk.

    Exact duplicates keep the lexicographically smallest design_id, so
    the result is independent of input order.
    """
    if not points:
        raise DomainError("pareto_front needs at least one point")
    ordered = sorted(points, key=lambda p: (p.risk, -p.ret, p.design_id))
    front: list[ScoredDesign] = []
    best_ret = -1.0
    for p in ordered:
        if p.ret > best_ret:
            front.append(p)
            best_ret = p.ret
    return front


def grid_select(front: list[ScoredDesign], count: int) -> list[ScoredDesign]:
    """Pick ``count`` designs by uniformly gridding the frontier's risk range.

    The risk span is split into equal intervals and the highest-return
    frontier point inside each is taken; empty intervals fall back to the
    frontier point nearest the interval centre that is not yet selected
    (ties toward lower risk).
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    if len(front) < count:
        raise SelectionError(
            f"frontier has {len(front)} points, need {count}")
    if len(front) == count:
        return list(front)
    lo = front[0].risk
    hi = front[-1].risk
    width = (hi - lo) / count
    selected: list[ScoredDesign] = []
    chosen = set()
    for k in range(count):
        left = lo + k * width
        right = lo + (k + 1) * width
        inside = [p for p in front
                  if (p.risk >= left and (p.risk < right or k == count - 1)
                      and p.design_id not in chosen)]
        if inside:
            pick = max(inside, key=lambda p: (p.ret, -p.risk))
        else:
            centre = left + width / 2.0
            remaining = [p for p in front if p.design_id not in chosen]
            pick = min(remaining, key=lambda p: (abs(p.risk - centre), p.risk))
        selected.append(pick)
        chosen.add(pick.design_id)
    return sorted(selected, key=lambda p: p.risk)


def threshold_select(points: list[ScoredDesign], eff_threshold: float,
                     count: int) -> list[ScoredDesign]:
    """The ``count`` lowest-risk designs among those with return below the threshold."""
    below = [p for p in points if p.ret < eff_threshold]
    if len(below) < count:
        raise SelectionError(
            f"only {len(below)} designs below return threshold "
            f"{eff_threshold!r}, need {count}")
    below.sort(key=lambda p: (p.risk, p.design_id))
    return below[:count]
