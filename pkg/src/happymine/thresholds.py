"""Participation thresholds, the level sets of `X(c) = sum_i max(1 - c_i / c, 0)`.

`X` is continuous, non-decreasing and piecewise linear with breakpoints at the costs, so
`X(c) = target` is solved in closed form on prefix sums instead of by numeric root finding:
if exactly the `n` cheapest miners satisfy `c_i < c`, then `X(c) = n - (c_1 + ... + c_n) / c`,
hence `c = (c_1 + ... + c_n) / (n - target)`.

The count `n` is the number of breakpoints with `X(c_n) < target`, which is a prefix of the
sorted costs since `X` is non-decreasing.
"""

from __future__ import annotations

import logging
from math import isfinite

from attrs import field, frozen
from wraps import Err, Ok, Option, Result, panic

from happymine.config import DEFAULT_TOLERANCES, Tolerances
from happymine.errors import DomainError, NoThreshold
from happymine.model import CostProfile, RewardParams, aggregate_x

__all__ = ("Threshold", "Thresholds", "solve_threshold", "find_thresholds")

logger = logging.getLogger(__name__)

STAR_TARGET = 1.0

EXPECTED_TARGET = "expected finite target of at least 1"
NO_SEGMENT = "threshold solve for target {} found {} participants among {} miners"
no_segment = NO_SEGMENT.format
STAR_EXISTS = "`c*` exists for every profile of at least two miners"
RESIDUAL = "X(c) = {} solved at c = {!r} with residual {!r}"
residual_of = RESIDUAL.format


@frozen()
class Threshold:
    """The solution of `X(c) = target` along with the participant count."""

    value: float = field()
    """The threshold `c`."""

    count: int = field()
    """The number of miners with `c_i < c`."""

    target: float = field()
    """The level `X(c)` solved for."""


@frozen()
class Thresholds:
    """The thresholds `c*` and (if it exists) `c†` of some reward instance."""

    star: Threshold = field()
    """The threshold `c*` solving `X(c*) = 1`."""

    dagger: Option[Threshold] = field()
    """The threshold `c†` solving `X(c†) = delta + 1`, present only when `m > delta + 1`."""


def solve_threshold(
    costs: CostProfile, target: float, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> Result[Threshold, NoThreshold]:
    """Solves `X(c) = target`.

    The solution satisfies `|X(c) - target| <= tolerances.threshold * target`; anything else is
    a bug and panics.

    Arguments:
        costs: The cost profile.
        target: The level to reach, at least `1`.
        tolerances: The numeric tolerances.

    Raises:
        DomainError: `target` is not finite or is less than `1`.

    Returns:
        The threshold wrapped in [`Ok`][wraps.result.Ok], or [`NoThreshold`][happymine.errors.NoThreshold]
            wrapped in [`Err`][wraps.result.Err] when `m <= target`.
    """
    if not (isfinite(target) and target >= STAR_TARGET):
        raise DomainError("target", target, EXPECTED_TARGET)

    count = costs.count

    if count <= target:
        return Err(NoThreshold(count, target))

    prefix = costs.prefix_sums()

    participants = 0

    for position, (cost, total) in enumerate(zip(costs.costs, prefix)):
        size = position + 1

        # `X(c_n) < target` multiplied through by `c_n > 0`
        if size * cost - total < target * cost:
            participants = size

        else:
            break

    if participants <= target:
        panic(no_segment(target, participants, count))

    value = prefix[participants - 1] / (participants - target)

    residual = aggregate_x(costs, value) - target

    if abs(residual) > tolerances.threshold * target:
        panic(residual_of(target, value, residual))

    logger.debug("X(c) = %s solved at c = %r with %d participants", target, value, participants)

    return Ok(Threshold(value, participants, target))


def find_thresholds(
    costs: CostProfile, params: RewardParams, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> Thresholds:
    """Computes both `c*` and `c†` for the given instance."""
    star = solve_threshold(costs, STAR_TARGET, tolerances).expect(STAR_EXISTS)
    dagger = solve_threshold(costs, params.decay + 1.0, tolerances).ok()

    return Thresholds(star, dagger)
