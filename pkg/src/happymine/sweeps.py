"""Parameter sweeps and decentralization metrics.

Raising `delta` never removes a participant and never raises the total hashrate. The lower-cost
member of a pair never gains relative market share either; stated as a formal result this is
sometimes given with the opposite inequality, but the argument behind it, and these sweeps,
support the non-increasing direction.
"""

from __future__ import annotations

import logging
from enum import Enum
from typing import Iterable, List

from attrs import field, frozen
from typing_aliases import DynamicTuple
from wraps import Err, Ok, Option, Result

from happymine.config import DEFAULT_TOLERANCES, Tolerances
from happymine.errors import DomainError, UndefinedShare
from happymine.model import CostProfile, RevaluationFactor, RewardParams
from happymine.solver import Equilibrium, Regime, Selection, solve_equilibrium

__all__ = (
    # types
    "Parameter",
    "MarketShare",
    "SweepRow",
    # operations
    "relative_market_share",
    "market_shares",
    "sweep",
    "delta_sweep",
)

logger = logging.getLogger(__name__)

NOT_SORTED = "expected non-decreasing values"
EMPTY = "expected at least one value"
LOWER_COST_FIRST = "expected the index of the lower-cost miner first"


class Parameter(Enum):
    """The swept parameter; the values match the scenario keys."""

    DELTA = "delta"
    PEG = "Q"
    FACTOR = "R"


@frozen()
class MarketShare:
    """The relative market share `r_ij` of a lower-cost miner `i` to a miner `j`."""

    first: int = field()
    second: int = field()
    ratio: float = field()


@frozen()
class SweepRow:
    parameter: Parameter = field()
    value: float = field()
    equilibrium: Equilibrium = field()

    hashrate_ratio: float = field()
    """The total hashrate relative to the one of the unswept instance."""

    shares: DynamicTuple[MarketShare] = field()
    """Relative market shares of every participating pair."""

    @property
    def regime(self) -> Regime:
        return self.equilibrium.regime

    @property
    def total_hashrate(self) -> float:
        return self.equilibrium.total_hashrate

    @property
    def participant_count(self) -> int:
        return len(self.equilibrium.participants)

    @property
    def leader_share(self) -> float:
        """The fraction `q_1 / H` of the lowest-cost miner."""
        equilibrium = self.equilibrium

        return equilibrium.hashrates[0] / equilibrium.total_hashrate

    @property
    def leader_relative_share(self) -> Option[float]:
        """The relative market share `r_12` of the two lowest-cost miners, if defined."""
        return relative_market_share(self.equilibrium, 0, 1).ok()


def relative_market_share(
    equilibrium: Equilibrium, first: int, second: int
) -> Result[float, UndefinedShare]:
    """Computes the relative market share `r_ij` of miners `first` and `second`.

    Indices are positions in the sorted cost order and `first < second`, so `first` is the
    lower-cost miner. Point regimes compare hashrates; at `Q` the largest equilibrium hashrates
    are compared.

    Raises:
        DomainError: `first` is not less than `second`.

    Returns:
        The ratio wrapped in [`Ok`][wraps.result.Ok], or
            [`UndefinedShare`][happymine.errors.UndefinedShare] wrapped in
            [`Err`][wraps.result.Err] naming the first miner that does not participate.
    """
    if not first < second:
        raise DomainError("second", second, LOWER_COST_FIRST)

    numerator = equilibrium.upper(first)

    if not numerator > 0.0:
        return Err(UndefinedShare(first))

    denominator = equilibrium.upper(second)

    if not denominator > 0.0:
        return Err(UndefinedShare(second))

    return Ok(numerator / denominator)


def market_shares(equilibrium: Equilibrium) -> DynamicTuple[MarketShare]:
    """Computes the relative market shares of every pair of participants, `i < j`."""
    participants = equilibrium.participants

    shares = []

    for position, first in enumerate(participants):
        for second in participants[position + 1 :]:
            ratio = relative_market_share(equilibrium, first, second).unwrap()

            shares.append(MarketShare(first, second, ratio))

    return tuple(shares)


def sweep(
    costs: CostProfile,
    params: RewardParams,
    parameter: Parameter,
    values: Iterable[float],
    selection: Selection = Selection.CANONICAL,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> DynamicTuple[SweepRow]:
    """Solves one equilibrium per value of `parameter`, in the given order.

    Sweeping `R` divides the costs by each value; the other parameters replace the
    corresponding field of `params`.
    """
    baseline = solve_equilibrium(costs, params, selection, tolerances).total_hashrate

    rows: List[SweepRow] = []

    for value in values:
        if parameter is Parameter.DELTA:
            equilibrium = solve_equilibrium(costs, params.with_decay(value), selection, tolerances)

        elif parameter is Parameter.PEG:
            equilibrium = solve_equilibrium(costs, params.with_peg(value), selection, tolerances)

        else:
            revalued = costs.revalue(RevaluationFactor(value))

            equilibrium = solve_equilibrium(revalued, params, selection, tolerances)

        rows.append(
            SweepRow(
                parameter=parameter,
                value=value,
                equilibrium=equilibrium,
                hashrate_ratio=equilibrium.total_hashrate / baseline,
                shares=market_shares(equilibrium),
            )
        )

        logger.debug(
            "%s = %r: %s with %d participants",
            parameter.value,
            value,
            equilibrium.regime.value,
            len(equilibrium.participants),
        )

    return tuple(rows)


def delta_sweep(
    costs: CostProfile,
    peg: float,
    decays: Iterable[float],
    selection: Selection = Selection.CANONICAL,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> DynamicTuple[SweepRow]:
    """Sweeps `delta` over the sorted `decays` at a fixed peg.

    Hashrate ratios are relative to the first value of the grid.

    Raises:
        DomainError: `decays` is empty or not sorted.
    """
    grid = tuple(decays)

    if not grid:
        raise DomainError("decays", grid, EMPTY)

    if any(previous > current for previous, current in zip(grid, grid[1:])):
        raise DomainError("decays", grid, NOT_SORTED)

    return sweep(costs, RewardParams(peg, grid[0]), Parameter.DELTA, grid, selection, tolerances)
