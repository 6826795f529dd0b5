"""Equilibria of the hashrate-pegged reward.

Every instance falls into exactly one of three regimes, decided by `c*`, `c†` and `1/Q`:

| regime    | condition                                    | total hashrate              |
|-----------|----------------------------------------------|-----------------------------|
| `BELOW_Q` | `c* > 1/Q`                                   | `1 / c*`                    |
| `AT_Q`    | `c* <= 1/Q <= c†`, or `c* <= 1/Q, m <= d+1`  | `Q`                         |
| `ABOVE_Q` | `c† < 1/Q` and `m > d + 1`                   | `(Q^d / c†)^(1 / (d + 1))`  |

In the point regimes the equilibrium is unique. At `Q` every miner with `c_i < 1/Q` may buy any
hashrate in `[(Q - c_i Q^2) / (d + 1), Q - c_i Q^2]` as long as the total is `Q`; a
[`Selection`][happymine.solver.Selection] policy picks one point of that set.
"""

from __future__ import annotations

import logging
from enum import Enum
from itertools import groupby

from attrs import field, frozen
from typing_aliases import DynamicTuple
from wraps import NULL, Option, Some, panic

from happymine.config import DEFAULT_TOLERANCES, Tolerances
from happymine.model import (
    CostProfile,
    HashrateProfile,
    RewardParams,
    left_to_right_sum,
    utility,
)
from happymine.thresholds import Threshold, Thresholds, find_thresholds
from happymine.typing import Costs, Hashrates, Indices, Utilities

__all__ = (
    # types
    "Regime",
    "Selection",
    "Classification",
    "Interval",
    "Equilibrium",
    "StaticEquilibrium",
    # operations
    "classify_regime",
    "solve_equilibrium",
    "solve_static",
    "canonical_at_q_point",
    "utilitarian_at_q_point",
    "proportional_hashrates",
)

logger = logging.getLogger(__name__)

STATIC = RewardParams(peg=1.0, decay=0.0)

INFEASIBLE_INTERVALS = "intervals summing to [{}, {}] can not reach {}"
infeasible_intervals = INFEASIBLE_INTERVALS.format


class Regime(Enum):
    """The equilibrium regime: total hashrate below, at or above `Q`."""

    BELOW_Q = "below_q"
    AT_Q = "at_q"
    ABOVE_Q = "above_q"


class Selection(Enum):
    """The policy picking one point of the equilibrium set at `Q`."""

    CANONICAL = "canonical"
    """Interpolate every interval with one common `lambda` so the total is `Q`."""

    UTILITARIAN = "utilitarian"
    """Fill intervals from the cheapest miners up, splitting evenly among equal costs."""


@frozen()
class Classification:
    regime: Regime = field()
    thresholds: Thresholds = field()


@frozen()
class Interval:
    """Closed equilibrium bounds `[low, high]` on the hashrate of one miner at `Q`."""

    low: float = field()
    high: float = field()

    @property
    def width(self) -> float:
        return self.high - self.low

    @property
    def middle(self) -> float:
        return (self.low + self.high) / 2.0

    def contains(self, value: float, tolerance: float = 0.0) -> bool:
        return self.low - tolerance <= value <= self.high + tolerance


@frozen()
class Equilibrium:
    """The equilibrium of some instance.

    In the `AT_Q` regime `intervals` holds the per-miner bounds and `profile` holds the point
    picked by `selection`; in the point regimes both are absent.
    """

    regime: Regime = field()
    thresholds: Thresholds = field()

    total_hashrate: float = field()
    """The closed-form total hashrate (exactly `Q` at `Q`)."""

    profile: HashrateProfile = field()
    participants: Indices = field()
    utilities: Utilities = field()

    intervals: Option[DynamicTuple[Interval]] = field(default=NULL)
    selection: Option[Selection] = field(default=NULL)

    @property
    def hashrates(self) -> Hashrates:
        return self.profile.hashrates

    def is_point(self) -> bool:
        return self.intervals.is_null()

    def upper(self, index: int) -> float:
        """Returns the largest equilibrium hashrate of miner `index`."""
        return self.intervals.map_or(
            self.hashrates[index], lambda intervals: intervals[index].high
        )

    def lower(self, index: int) -> float:
        """Returns the smallest equilibrium hashrate of miner `index`."""
        return self.intervals.map_or(
            self.hashrates[index], lambda intervals: intervals[index].low
        )


@frozen()
class StaticEquilibrium:
    """The unique equilibrium of the static (`delta = 0`) model."""

    threshold: Threshold = field()
    total_hashrate: float = field()
    profile: HashrateProfile = field()
    participants: Indices = field()
    utilities: Utilities = field()

    @property
    def hashrates(self) -> Hashrates:
        return self.profile.hashrates


def classify_regime(
    costs: CostProfile, params: RewardParams, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> Classification:
    """Decides the regime of the instance.

    Thresholds within `tolerances.boundary` of `1/Q` resolve to `AT_Q`, the closed case.
    """
    thresholds = find_thresholds(costs, params, tolerances)

    bound = params.bound
    tolerance = tolerances.boundary

    if thresholds.star.value - bound > tolerance:
        regime = Regime.BELOW_Q

    elif thresholds.dagger.is_some_and(lambda dagger: bound - dagger.value > tolerance):
        regime = Regime.ABOVE_Q

    else:
        regime = Regime.AT_Q

    logger.debug(
        "classified %s (c* = %r, 1/Q = %r, c† = %r)",
        regime.value,
        thresholds.star.value,
        bound,
        thresholds.dagger.map_or(None, lambda dagger: dagger.value),
    )

    return Classification(regime, thresholds)


def proportional_hashrates(costs: Costs, bound: float, scale: float) -> Hashrates:
    """Computes `q_i = scale * max(1 - c_i / bound, 0)`, with `c_i = bound` not participating."""
    return tuple(scale * (1.0 - cost / bound) if cost < bound else 0.0 for cost in costs)


def compute_utilities(
    profile: HashrateProfile, costs: CostProfile, params: RewardParams
) -> Utilities:
    return tuple(utility(index, profile, costs, params) for index in range(costs.count))


def at_q_intervals(costs: CostProfile, params: RewardParams) -> DynamicTuple[Interval]:
    peg = params.peg
    bound = params.bound
    share = params.decay + 1.0

    intervals = []

    for cost in costs.costs:
        if cost < bound:
            high = peg - cost * peg * peg

            intervals.append(Interval(high / share, high))

        else:
            intervals.append(Interval(0.0, 0.0))

    return tuple(intervals)


def check_feasible(low: float, high: float, peg: float, tolerances: Tolerances) -> None:
    slack = tolerances.at_q * peg

    if peg < low - slack or peg > high + slack:
        panic(infeasible_intervals(low, high, peg))


def canonical_at_q_point(
    intervals: DynamicTuple[Interval], peg: float, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> Hashrates:
    """Picks `q_i = lo_i + lambda (hi_i - lo_i)` with the one `lambda` in `[0, 1]` reaching `Q`.

    Raises:
        Panic: The intervals can not sum to `Q`.
    """
    low = left_to_right_sum(interval.low for interval in intervals)
    high = left_to_right_sum(interval.high for interval in intervals)

    check_feasible(low, high, peg, tolerances)

    span = high - low

    scale = min(max((peg - low) / span, 0.0), 1.0) if span > 0.0 else 0.0

    return tuple(interval.low + scale * interval.width for interval in intervals)


def utilitarian_at_q_point(
    intervals: DynamicTuple[Interval],
    costs: CostProfile,
    peg: float,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Hashrates:
    """Starts everyone at `lo_i` and raises the cheapest miners to `hi_i` first.

    Miners of equal cost are raised together by the same fraction of their widths.

    Raises:
        Panic: The intervals can not sum to `Q`.
    """
    low = left_to_right_sum(interval.low for interval in intervals)
    high = left_to_right_sum(interval.high for interval in intervals)

    check_feasible(low, high, peg, tolerances)

    hashrates = [interval.low for interval in intervals]

    remaining = max(peg - low, 0.0)

    positions = range(costs.count)

    for _, group in groupby(positions, key=costs.costs.__getitem__):
        members = list(group)

        needed = left_to_right_sum(intervals[index].width for index in members)

        if not needed:
            continue

        fraction = min(remaining / needed, 1.0)

        for index in members:
            hashrates[index] = intervals[index].low + fraction * intervals[index].width

        remaining = max(remaining - needed, 0.0)

        if not remaining:
            break

    return tuple(hashrates)


def solve_equilibrium(
    costs: CostProfile,
    params: RewardParams,
    selection: Selection = Selection.CANONICAL,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Equilibrium:
    """Constructs the equilibrium of the instance.

    Arguments:
        costs: The cost profile.
        params: The reward parameters.
        selection: The policy picking the point at `Q`.
        tolerances: The numeric tolerances.

    Returns:
        The equilibrium.
    """
    classification = classify_regime(costs, params, tolerances)

    regime = classification.regime
    thresholds = classification.thresholds

    intervals: Option[DynamicTuple[Interval]] = NULL
    chosen: Option[Selection] = NULL

    if regime is Regime.BELOW_Q:
        star = thresholds.star.value
        total = 1.0 / star

        hashrates = proportional_hashrates(costs.costs, star, total)

    elif regime is Regime.ABOVE_Q:
        dagger = thresholds.dagger.unwrap().value
        share = params.decay + 1.0
        total = (params.peg**params.decay / dagger) ** (1.0 / share)

        hashrates = proportional_hashrates(costs.costs, dagger, total / share)

    else:
        total = params.peg

        bounds = at_q_intervals(costs, params)

        if selection is Selection.UTILITARIAN:
            hashrates = utilitarian_at_q_point(bounds, costs, total, tolerances)

        else:
            hashrates = canonical_at_q_point(bounds, total, tolerances)

        intervals = Some(bounds)
        chosen = Some(selection)

    profile = HashrateProfile(hashrates)

    return Equilibrium(
        regime=regime,
        thresholds=thresholds,
        total_hashrate=total,
        profile=profile,
        participants=profile.participants(),
        utilities=compute_utilities(profile, costs, params),
        intervals=intervals,
        selection=chosen,
    )


def solve_static(costs: CostProfile) -> StaticEquilibrium:
    """Constructs the unique equilibrium of the static proportional model.

    Every participant earns `(1 - c_i / c*)^2`.
    """
    threshold = find_thresholds(costs, STATIC).star

    star = threshold.value
    total = 1.0 / star

    profile = HashrateProfile(proportional_hashrates(costs.costs, star, total))

    return StaticEquilibrium(
        threshold=threshold,
        total_hashrate=total,
        profile=profile,
        participants=profile.participants(),
        utilities=compute_utilities(profile, costs, STATIC),
    )
