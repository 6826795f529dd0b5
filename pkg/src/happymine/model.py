"""The hashrate-pegged proportional reward model.

Every miner `i` buys hashrate `q_i` at a per-unit cost `c_i`. Given the total hashrate
`H = q_1 + ... + q_m`, the block reward is

```text
r(H) = min(1, (Q / H) ** delta)
```

and miner `i` receives `x_i = (q_i / H) * r(H)`, so that its utility is `x_i - c_i * q_i`.

The `delta = 0` member of the family is the static proportional model: the reward is always `1`.

Example:
    ```python
    from math import isclose

    from happymine import CostProfile, HashrateProfile, RewardParams, utility

    costs = CostProfile.from_costs([0.1, 0.1])
    params = RewardParams(peg=1.0, decay=1.0)
    profile = HashrateProfile((1.0, 1.0))

    assert isclose(utility(0, profile, costs, params), 0.15)
    ```
"""

from __future__ import annotations

from enum import Enum
from functools import reduce
from math import isfinite
from operator import add
from typing import Iterable, Sequence, TypeVar

from attrs import Attribute, evolve, field, frozen
from typing_aliases import DynamicTuple
from typing_extensions import Self

from happymine.errors import DomainError
from happymine.typing import Costs, Hashrates, Indices

__all__ = (
    # types
    "RewardParams",
    "CostProfile",
    "HashrateProfile",
    "RevaluationFactor",
    "Side",
    # operations
    "left_to_right_sum",
    "reward",
    "allocation",
    "utility",
    "payoff",
    "branch_derivative",
    "utility_derivative",
    "aggregate_x",
)

T = TypeVar("T")

MIN_MINERS = 2

POSITIVE = "expected finite positive value"
NON_NEGATIVE = "expected finite non-negative value"
TOO_FEW_MINERS = "expected at least 2 miners, got {}"
too_few_miners = TOO_FEW_MINERS.format
NOT_SORTED = "expected costs sorted in non-decreasing order"
NOT_PERMUTATION = "expected a permutation of miner indices"
LENGTH_MISMATCH = "expected {} values, got {}"
length_mismatch = LENGTH_MISMATCH.format


def is_positive(value: float) -> bool:
    return isfinite(value) and value > 0.0


def is_non_negative(value: float) -> bool:
    return isfinite(value) and value >= 0.0


def left_to_right_sum(values: Iterable[float]) -> float:
    """Sums `values` strictly from left to right.

    The builtin `sum` may compensate rounding errors depending on the Python version,
    which would make regime decisions near `H = Q` version-dependent.
    """
    return reduce(add, values, 0.0)


@frozen()
class RewardParams:
    """The `(Q, delta)` pair defining a reward function of the family."""

    peg: float = field()
    """The hashrate `Q` up to which the full reward is paid."""

    decay: float = field(default=1.0)
    """The decay exponent `delta` applied above the peg."""

    @peg.validator
    def check_peg(self, attribute: Attribute[float], value: float) -> None:
        if not is_positive(value):
            raise DomainError(attribute.name, value, POSITIVE)

    @decay.validator
    def check_decay(self, attribute: Attribute[float], value: float) -> None:
        if not is_non_negative(value):
            raise DomainError(attribute.name, value, NON_NEGATIVE)

    @property
    def bound(self) -> float:
        """The participation bound `1/Q`."""
        return 1.0 / self.peg

    def is_static(self) -> bool:
        return not self.decay

    def with_decay(self, decay: float) -> Self:
        return evolve(self, decay=decay)

    def with_peg(self, peg: float) -> Self:
        return evolve(self, peg=peg)


@frozen()
class RevaluationFactor:
    """The multiplier `R` applied to the market value of the mined currency."""

    value: float = field()

    @value.validator
    def check_value(self, attribute: Attribute[float], value: float) -> None:
        if not is_positive(value):
            raise DomainError(attribute.name, value, POSITIVE)


@frozen()
class CostProfile:
    """Per-unit hashrate costs sorted in non-decreasing order.

    Use [`from_costs`][happymine.model.CostProfile.from_costs] to build profiles from costs
    in arbitrary order; the sorting permutation is kept in
    [`order`][happymine.model.CostProfile.order] so that results can be reported
    in the input order.
    """

    costs: Costs = field()
    """The sorted costs `c_1 <= ... <= c_m`."""

    order: Indices = field()
    """The input index of every sorted position."""

    @costs.validator
    def check_costs(self, attribute: Attribute[Costs], value: Costs) -> None:
        if len(value) < MIN_MINERS:
            raise DomainError(attribute.name, value, too_few_miners(len(value)))

        if not all(map(is_positive, value)):
            raise DomainError(attribute.name, value, POSITIVE)

        if any(previous > current for previous, current in zip(value, value[1:])):
            raise DomainError(attribute.name, value, NOT_SORTED)

    @order.validator
    def check_order(self, attribute: Attribute[Indices], value: Indices) -> None:
        if sorted(value) != list(range(len(self.costs))):
            raise DomainError(attribute.name, value, NOT_PERMUTATION)

    @classmethod
    def from_costs(cls, costs: Iterable[float]) -> Self:
        """Sorts `costs` (stably) and records the permutation.

        Raises:
            DomainError: Fewer than two costs are given, or some cost is not finite and positive.
        """
        values = tuple(map(float, costs))

        if not all(map(is_positive, values)):
            raise DomainError("costs", values, POSITIVE)

        order = tuple(sorted(range(len(values)), key=values.__getitem__))

        return cls(tuple(values[index] for index in order), order)

    @classmethod
    def homogeneous(cls, count: int, cost: float) -> Self:
        return cls.from_costs([cost] * count)

    @property
    def count(self) -> int:
        """The number of miners `m`."""
        return len(self.costs)

    def is_homogeneous(self) -> bool:
        first = self.costs[0]

        return all(cost == first for cost in self.costs)

    def prefix_sums(self) -> Costs:
        """Returns `(c_1, c_1 + c_2, ..., c_1 + ... + c_m)`, summed from left to right."""
        sums = []
        total = 0.0

        for cost in self.costs:
            total += cost
            sums.append(total)

        return tuple(sums)

    def to_input_order(self, values: Sequence[T]) -> DynamicTuple[T]:
        """Rearranges per-miner `values` given in sorted order into the input order."""
        if len(values) != self.count:
            raise DomainError("values", values, length_mismatch(self.count, len(values)))

        result = list(values)

        for position, index in enumerate(self.order):
            result[index] = values[position]

        return tuple(result)

    def from_input_order(self, values: Sequence[T]) -> DynamicTuple[T]:
        """Rearranges per-miner `values` given in the input order into sorted order."""
        if len(values) != self.count:
            raise DomainError("values", values, length_mismatch(self.count, len(values)))

        return tuple(values[index] for index in self.order)

    def revalue(self, factor: RevaluationFactor) -> Self:
        """Divides every cost by `R`, which keeps the order."""
        value = factor.value

        return evolve(self, costs=tuple(cost / value for cost in self.costs))


@frozen()
class HashrateProfile:
    """Per-miner hashrates along with their cached total."""

    hashrates: Hashrates = field()

    total: float = field(init=False)
    """The total hashrate `H`, summed from left to right."""

    @hashrates.validator
    def check_hashrates(self, attribute: Attribute[Hashrates], value: Hashrates) -> None:
        if not all(map(is_non_negative, value)):
            raise DomainError(attribute.name, value, NON_NEGATIVE)

    @total.default
    def default_total(self) -> float:
        return left_to_right_sum(self.hashrates)

    @classmethod
    def zeros(cls, count: int) -> Self:
        return cls((0.0,) * count)

    @classmethod
    def from_iterable(cls, hashrates: Iterable[float]) -> Self:
        return cls(tuple(map(float, hashrates)))

    @property
    def count(self) -> int:
        return len(self.hashrates)

    def others_total(self, index: int) -> float:
        """Returns `H_{-i}`, the total hashrate of everyone but miner `index`."""
        return left_to_right_sum(
            hashrate for other, hashrate in enumerate(self.hashrates) if other != index
        )

    def replace(self, index: int, hashrate: float) -> Self:
        hashrates = list(self.hashrates)
        hashrates[index] = hashrate

        return type(self)(tuple(hashrates))

    def participants(self) -> Indices:
        return tuple(index for index, hashrate in enumerate(self.hashrates) if hashrate > 0.0)


class Side(Enum):
    """The side of a one-sided derivative at `H = Q`."""

    LEFT = "left"
    RIGHT = "right"


def check_total(total: float) -> None:
    if not total > 0.0:
        raise DomainError("total", total, POSITIVE)


def decay_at(params: RewardParams, above: bool) -> float:
    return params.decay if above else 0.0


def reward(total: float, params: RewardParams) -> float:
    """Computes the block reward `r(H) = min(1, (Q / H) ** delta)`.

    Arguments:
        total: The total hashrate `H`.
        params: The reward parameters.

    Raises:
        DomainError: `total` is not positive.

    Returns:
        The reward in `(0, 1]`.
    """
    check_total(total)

    return (params.peg / total) ** decay_at(params, total > params.peg)


def allocation(index: int, profile: HashrateProfile, params: RewardParams) -> float:
    """Computes the reward share `x_i = (q_i / H) * r(H)` of miner `index`.

    Raises:
        DomainError: The total hashrate is zero.
    """
    total = profile.total

    check_total(total)

    return profile.hashrates[index] / total * reward(total, params)


def utility(
    index: int, profile: HashrateProfile, costs: CostProfile, params: RewardParams
) -> float:
    """Computes `U_i = x_i - c_i * q_i`.

    Raises:
        DomainError: The total hashrate is zero.
    """
    return allocation(index, profile, params) - costs.costs[index] * profile.hashrates[index]


def payoff(hashrate: float, others_total: float, cost: float, params: RewardParams) -> float:
    """Computes the utility of buying `hashrate` against `others_total` of everyone else.

    Buying nothing always yields `0`, even against an empty system.
    """
    if not hashrate:
        return 0.0

    total = others_total + hashrate

    return hashrate / total * reward(total, params) - cost * hashrate


def branch_derivative(
    hashrate: float, total: float, cost: float, params: RewardParams, above: bool
) -> float:
    """Computes the marginal utility on one branch of the reward.

    Below the peg this is `(H - q) / H^2 - c`; above it is
    `Q^delta (H - (delta + 1) q) / H^(delta + 2) - c`, written as
    `(Q / H)^delta (H - (delta + 1) q) / H^2 - c` so both branches share one expression.
    """
    check_total(total)

    decay = decay_at(params, above)

    return (params.peg / total) ** decay * (total - (decay + 1.0) * hashrate) / (
        total * total
    ) - cost


def utility_derivative(
    index: int,
    profile: HashrateProfile,
    costs: CostProfile,
    params: RewardParams,
    side: Side = Side.RIGHT,
) -> float:
    """Computes `dU_i / dq_i`.

    At `H = Q` the utility has a kink; `side` picks the one-sided derivative there.

    Raises:
        DomainError: The total hashrate is zero.
    """
    total = profile.total
    peg = params.peg

    if total == peg:
        above = side is Side.RIGHT

    else:
        above = total > peg

    return branch_derivative(
        profile.hashrates[index], total, costs.costs[index], params, above
    )


def aggregate_x(costs: CostProfile, candidate: float) -> float:
    """Computes `X(c) = sum_i max(1 - c_i / c, 0)`.

    Raises:
        DomainError: `candidate` is not positive.
    """
    if not candidate > 0.0:
        raise DomainError("candidate", candidate, POSITIVE)

    result = 0.0

    for cost in costs.costs:
        if cost >= candidate:
            break

        result += 1.0 - cost / candidate

    return result
