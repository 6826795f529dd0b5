"""Collusion and Sybil analyses of homogeneous instances.

Both attacks change the number of players: `k` colluders act as one miner, leaving
`m - k + 1` players, while one miner posing as `k` identities yields `m + k - 1` players.
An attack is profitable when the per-attacker utility at the shifted equilibrium beats the
per-miner utility of the original one.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from attrs import Attribute, field, frozen
from typing_extensions import Self

from happymine.config import DEFAULT_TOLERANCES, Tolerances
from happymine.errors import DomainError, UnsupportedError
from happymine.model import CostProfile, HashrateProfile, RewardParams, is_positive, reward
from happymine.solver import Regime, Selection, solve_equilibrium

__all__ = (
    # types
    "CollusionScenario",
    "AttackReport",
    "SybilReport",
    # operations
    "collusion_report",
    "sybil_report",
    "split_gain",
    "identity_best_response",
)

logger = logging.getLogger(__name__)

MONOPOLY_UTILITY = 1.0

POSITIVE = "expected finite positive value"
AT_LEAST = "expected at least {}"
at_least = AT_LEAST.format
COLLUDERS = "expected between 2 and {} colluders"
colluders_range = COLLUDERS.format
HETEROGENEOUS = "collusion among miners of different costs is not modeled"
NO_HASHRATE = "expected the splitting miner to hold positive hashrate"
BAD_WEIGHTS = "expected at least one positive finite weight and no negative ones"


@frozen()
class AttackReport:
    """Per-capita utilities with and without an attack."""

    baseline_utility: float = field()
    """The per-miner utility of the original equilibrium."""

    attack_utility: float = field()
    """The per-attacker utility of the shifted equilibrium."""

    regime_before: Regime = field()
    regime_after: Regime = field()

    profitable: bool = field()
    """Whether `attack_utility` exceeds `baseline_utility` by more than the margin."""

    @classmethod
    def compare(
        cls,
        baseline_utility: float,
        attack_utility: float,
        regime_before: Regime,
        regime_after: Regime,
        tolerances: Tolerances = DEFAULT_TOLERANCES,
    ) -> Self:
        return cls(
            baseline_utility=baseline_utility,
            attack_utility=attack_utility,
            regime_before=regime_before,
            regime_after=regime_after,
            profitable=attack_utility > baseline_utility + tolerances.profit,
        )


@frozen()
class CollusionScenario:
    """`colluders` out of `count` miners of equal `cost` acting as one."""

    count: int = field()
    cost: float = field()
    colluders: int = field()
    params: RewardParams = field()

    @count.validator
    def check_count(self, attribute: Attribute[int], value: int) -> None:
        if value < 2:
            raise DomainError(attribute.name, value, at_least(2))

    @cost.validator
    def check_cost(self, attribute: Attribute[float], value: float) -> None:
        if not is_positive(value):
            raise DomainError(attribute.name, value, POSITIVE)

    @colluders.validator
    def check_colluders(self, attribute: Attribute[int], value: int) -> None:
        if not 2 <= value <= self.count:
            raise DomainError(attribute.name, value, colluders_range(self.count))

    @classmethod
    def from_profile(cls, costs: CostProfile, colluders: int, params: RewardParams) -> Self:
        """Builds the scenario from a cost profile.

        Raises:
            UnsupportedError: The costs are not all equal.
        """
        if not costs.is_homogeneous():
            raise UnsupportedError(HETEROGENEOUS)

        return cls(costs.count, costs.costs[0], colluders, params)

    @property
    def remaining(self) -> int:
        """The number of players once the colluders merge."""
        return self.count - self.colluders + 1


@frozen()
class SybilReport:
    """Both views of one miner posing as `identities` miners."""

    identities: int = field()

    shift: AttackReport = field()
    """The attacker utility at the equilibrium of the enlarged game."""

    split_gain: float = field()
    """The utility change of splitting at the current profile, which is always zero."""


def homogeneous_utility(
    count: int, cost: float, params: RewardParams, tolerances: Tolerances
) -> Tuple[float, Regime]:
    equilibrium = solve_equilibrium(
        CostProfile.homogeneous(count, cost), params, Selection.CANONICAL, tolerances
    )

    return equilibrium.utilities[0], equilibrium.regime


def collusion_report(
    scenario: CollusionScenario, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> AttackReport:
    """Compares the per-miner utility with the per-colluder share of the coalition.

    The coalition is one miner of the same cost whose utility is split evenly among the
    colluders. When everyone colludes, the monopolist approaches the full reward with a
    vanishing purchase, so each colluder is credited `1 / k`.
    """
    count = scenario.count
    cost = scenario.cost
    colluders = scenario.colluders
    params = scenario.params

    baseline, before = homogeneous_utility(count, cost, params, tolerances)

    remaining = scenario.remaining

    if remaining == 1:
        coalition, after = MONOPOLY_UTILITY, Regime.BELOW_Q

    else:
        coalition, after = homogeneous_utility(remaining, cost, params, tolerances)

    report = AttackReport.compare(baseline, coalition / colluders, before, after, tolerances)

    logger.debug(
        "collusion of %d out of %d: %r against %r", colluders, count, report.attack_utility, baseline
    )

    return report


def sybil_report(
    count: int,
    cost: float,
    identities: int,
    params: RewardParams,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> SybilReport:
    """Analyzes one of `count` miners of equal `cost` posing as `identities` miners.

    In the shifted view the attacker controls `identities` players of the
    `count + identities - 1` player game; in the static model its utility is
    `k / (m + k - 1)^2`. In the fixed-profile view the attacker splits its current
    hashrate, which leaves its utility unchanged.

    Raises:
        DomainError: `count` is less than two or `identities` is less than one.
    """
    if count < 2:
        raise DomainError("count", count, at_least(2))

    if identities < 1:
        raise DomainError("identities", identities, at_least(1))

    baseline, before = homogeneous_utility(count, cost, params, tolerances)

    enlarged, after = homogeneous_utility(count + identities - 1, cost, params, tolerances)

    shift = AttackReport.compare(baseline, identities * enlarged, before, after, tolerances)

    equilibrium = solve_equilibrium(CostProfile.homogeneous(count, cost), params)

    gain = split_gain(
        0, equilibrium.profile, CostProfile.homogeneous(count, cost), params, [1.0] * identities
    )

    return SybilReport(identities, shift, gain)


def split_gain(
    index: int,
    profile: HashrateProfile,
    costs: CostProfile,
    params: RewardParams,
    weights: Optional[Sequence[float]] = None,
) -> float:
    """Computes the utility change of miner `index` splitting its hashrate by `weights`.

    The pieces are computed in exact rational arithmetic so that they sum to the original
    hashrate; the total hashrate, hence the reward, does not move, and the gain is exactly `0`.

    Raises:
        DomainError: The miner holds no hashrate, or the weights are invalid.
    """
    if weights is None:
        weights = (1.0, 1.0)

    hashrate = profile.hashrates[index]

    if not hashrate > 0.0:
        raise DomainError("hashrate", hashrate, NO_HASHRATE)

    if not all(is_positive(weight) or weight == 0.0 for weight in weights) or not any(weights):
        raise DomainError("weights", weights, BAD_WEIGHTS)

    exact_weights = [Fraction(weight) for weight in weights]
    whole = sum(exact_weights, Fraction(0))

    exact_hashrate = Fraction(hashrate)

    pieces = [exact_hashrate * weight / whole for weight in exact_weights]

    total = Fraction(profile.total)
    exact_reward = Fraction(reward(profile.total, params))
    cost = Fraction(costs.costs[index])

    def piece_utility(piece: Fraction) -> Fraction:
        return piece / total * exact_reward - cost * piece

    before = piece_utility(exact_hashrate)
    after = sum(map(piece_utility, pieces), Fraction(0))

    return float(after - before)


def identity_best_response(others: int) -> int:
    """Returns the identity count `k` maximizing `k / (N + k)^2` against `N` other identities.

    The maximizer is `k = N`, so identities keep escalating in the repeated game.

    Raises:
        DomainError: `others` is less than one.
    """
    if others < 1:
        raise DomainError("others", others, at_least(1))

    candidates = range(1, 2 * others + 2)

    return max(candidates, key=lambda identities: Fraction(identities, (others + identities) ** 2))
