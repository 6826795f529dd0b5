"""Currency revaluation.

Multiplying the market value of the mined currency by `R` is equivalent to dividing every cost
by `R` and multiplying every utility by `R`. The equilibrium total hashrate then scales by `R`
while it stays below `Q`, by `R^(1 / (delta + 1))` while it stays above `Q`, and not at all
while it stays at `Q`.
"""

from __future__ import annotations

import logging
from enum import Enum

from attrs import field, frozen

from happymine.config import DEFAULT_TOLERANCES, Tolerances
from happymine.model import CostProfile, RevaluationFactor, RewardParams
from happymine.solver import Equilibrium, Regime, Selection, solve_equilibrium
from happymine.typing import Utilities

__all__ = ("Scaling", "RevaluationReport", "revalue", "classify_scaling")

logger = logging.getLogger(__name__)


class Scaling(Enum):
    """The power law relating the total hashrates before and after revaluation."""

    LINEAR = "linear"
    """Below `Q` on both sides, the ratio is `R`."""

    ROOT = "root"
    """Above `Q` on both sides, the ratio is `R^(1 / (delta + 1))`."""

    PEGGED = "pegged"
    """At `Q` on both sides, the ratio is `1`."""

    TRANSITIONAL = "transitional"
    """The regime changes and no single power law applies."""


SCALINGS = {
    (Regime.BELOW_Q, Regime.BELOW_Q): Scaling.LINEAR,
    (Regime.ABOVE_Q, Regime.ABOVE_Q): Scaling.ROOT,
    (Regime.AT_Q, Regime.AT_Q): Scaling.PEGGED,
}


@frozen()
class RevaluationReport:
    factor: RevaluationFactor = field()

    before: Equilibrium = field()

    after: Equilibrium = field()
    """The equilibrium of the game with costs `c_i / R`."""

    hashrate_ratio: float = field()
    """The ratio `H_after / H_before`."""

    scaling: Scaling = field()

    utilities: Utilities = field()
    """The utilities after revaluation, in units of the original currency value."""

    def expected_ratio(self, params: RewardParams) -> float:
        """Returns the ratio predicted by [`scaling`][happymine.revaluation.RevaluationReport.scaling].

        Transitional revaluations have no prediction, so the measured ratio is returned.
        """
        value = self.factor.value

        if self.scaling is Scaling.LINEAR:
            return value

        if self.scaling is Scaling.ROOT:
            return value ** (1.0 / (params.decay + 1.0))

        if self.scaling is Scaling.PEGGED:
            return 1.0

        return self.hashrate_ratio


def classify_scaling(before: Regime, after: Regime) -> Scaling:
    return SCALINGS.get((before, after), Scaling.TRANSITIONAL)


def revalue(
    costs: CostProfile,
    params: RewardParams,
    factor: RevaluationFactor,
    selection: Selection = Selection.CANONICAL,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> RevaluationReport:
    """Solves the instance before and after multiplying the currency value by `factor`.

    Arguments:
        costs: The cost profile.
        params: The reward parameters.
        factor: The revaluation factor `R`.
        selection: The policy picking the point at `Q`.
        tolerances: The numeric tolerances.

    Returns:
        The revaluation report.
    """
    before = solve_equilibrium(costs, params, selection, tolerances)
    after = solve_equilibrium(costs.revalue(factor), params, selection, tolerances)

    scaling = classify_scaling(before.regime, after.regime)

    value = factor.value

    report = RevaluationReport(
        factor=factor,
        before=before,
        after=after,
        hashrate_ratio=after.total_hashrate / before.total_hashrate,
        scaling=scaling,
        utilities=tuple(value * utility for utility in after.utilities),
    )

    logger.debug("revaluation by %r: %s, ratio %r", value, scaling.value, report.hashrate_ratio)

    return report
