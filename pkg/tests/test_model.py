from __future__ import annotations

from math import isclose

from hypothesis import given
from hypothesis.strategies import DrawFn, composite, floats, integers, lists
from pytest import fail, raises

from happymine.errors import DomainError
from happymine.model import (
    CostProfile,
    HashrateProfile,
    RevaluationFactor,
    RewardParams,
    Side,
    aggregate_x,
    allocation,
    left_to_right_sum,
    reward,
    utility,
    utility_derivative,
)

ONE = RewardParams(peg=1.0, decay=1.0)
STATIC = RewardParams(peg=1.0, decay=0.0)

PAIR_COSTS = CostProfile.from_costs([0.1, 0.8])
LADDER_COSTS = CostProfile.from_costs([index / (index + 1) for index in range(1, 41)])

LADDER_STAR = 493 / 560

EXPECTED_DOMAIN_ERROR = "expected `DomainError`"


def test_reward() -> None:
    assert reward(1.0, ONE) == 1.0
    assert reward(0.5, ONE) == 1.0
    assert reward(2.0, ONE) == 0.5
    assert reward(4.0, RewardParams(peg=1.0, decay=2.0)) == 0.0625


def test_reward_static_is_constant() -> None:
    for total in (1e-9, 0.5, 1.0, 2.0, 1e9):
        assert reward(total, STATIC) == 1.0


def test_reward_non_positive_total() -> None:
    for total in (0.0, -1.0):
        try:
            reward(total, ONE)

        except DomainError as error:
            assert error.name == "total"
            assert error.value == total

        else:
            fail(EXPECTED_DOMAIN_ERROR)


@given(floats(min_value=1e-6, max_value=1e6), floats(min_value=1e-6, max_value=1e6))
def test_reward_non_increasing(first: float, second: float) -> None:
    low, high = sorted((first, second))

    value = reward(high, ONE)

    assert 0.0 < value <= 1.0
    assert reward(low, ONE) >= value


def test_allocation() -> None:
    profile = HashrateProfile((1.0, 1.0))

    assert allocation(0, profile, ONE) == 0.25
    assert allocation(1, profile, ONE) == 0.25

    static = HashrateProfile((0.3, 0.7))

    assert isclose(allocation(0, static, STATIC), 0.3)
    assert isclose(allocation(1, static, STATIC), 0.7)

    assert allocation(0, HashrateProfile((0.0, 1.0)), ONE) == 0.0


def test_allocation_zero_total() -> None:
    with raises(DomainError):
        allocation(0, HashrateProfile.zeros(2), ONE)


@composite
def profiles(draw: DrawFn, min_size: int = 2, max_size: int = 10) -> HashrateProfile:
    hashrates = draw(
        lists(floats(min_value=0.0, max_value=100.0), min_size=min_size, max_size=max_size)
    )

    hashrates[0] = max(hashrates[0], 1e-3)

    return HashrateProfile.from_iterable(hashrates)


@given(profiles(), floats(min_value=0.1, max_value=10.0), floats(min_value=0.0, max_value=5.0))
def test_allocations_sum_to_reward(profile: HashrateProfile, peg: float, decay: float) -> None:
    params = RewardParams(peg, decay)

    total = left_to_right_sum(allocation(index, profile, params) for index in range(profile.count))

    assert abs(total - reward(profile.total, params)) <= 1e-12


def test_utility() -> None:
    profile = HashrateProfile((1.0, 1.0))
    costs = CostProfile.from_costs([0.1, 0.1])

    assert isclose(utility(0, profile, costs, ONE), 0.15)

    assert utility(1, HashrateProfile((1.0, 0.0)), costs, ONE) == 0.0


def test_utility_derivative_static_branches_coincide() -> None:
    profile = HashrateProfile((0.5, 0.5))

    left = utility_derivative(0, profile, PAIR_COSTS, STATIC, Side.LEFT)
    right = utility_derivative(0, profile, PAIR_COSTS, STATIC, Side.RIGHT)

    assert left == right


def test_utility_derivative_at_peg() -> None:
    profile = HashrateProfile((0.5, 0.5))

    left = utility_derivative(0, profile, PAIR_COSTS, ONE, Side.LEFT)
    right = utility_derivative(0, profile, PAIR_COSTS, ONE, Side.RIGHT)

    assert left >= right

    assert isclose(left, 0.5 - 0.1)
    assert isclose(right, 0.0 - 0.1)


STEP = 1e-6


@given(
    floats(min_value=0.05, max_value=5.0),
    floats(min_value=0.05, max_value=5.0),
    floats(min_value=0.01, max_value=2.0),
    floats(min_value=0.1, max_value=10.0),
    floats(min_value=0.0, max_value=5.0),
)
def test_utility_derivative_matches_differences(
    hashrate: float, other: float, cost: float, peg: float, decay: float
) -> None:
    total = hashrate + other

    if abs(total - peg) < 1e-3:
        return

    params = RewardParams(peg, decay)
    costs = CostProfile.from_costs([cost, cost])

    forward = utility(0, HashrateProfile((hashrate + STEP, other)), costs, params)
    backward = utility(0, HashrateProfile((hashrate - STEP, other)), costs, params)

    difference = (forward - backward) / (2.0 * STEP)

    derivative = utility_derivative(0, HashrateProfile((hashrate, other)), costs, params)

    assert abs(derivative - difference) <= 1e-6


def test_aggregate_x() -> None:
    assert isclose(aggregate_x(PAIR_COSTS, 0.9), 1.0)
    assert aggregate_x(PAIR_COSTS, 0.1) == 0.0
    assert aggregate_x(PAIR_COSTS, 0.05) == 0.0

    assert abs(aggregate_x(LADDER_COSTS, LADDER_STAR) - 1.0) <= 1e-12


def test_aggregate_x_non_positive() -> None:
    with raises(DomainError):
        aggregate_x(PAIR_COSTS, 0.0)


@composite
def cost_profiles(draw: DrawFn, min_size: int = 2, max_size: int = 20) -> CostProfile:
    costs = draw(
        lists(floats(min_value=0.01, max_value=2.0), min_size=min_size, max_size=max_size)
    )

    return CostProfile.from_costs(costs)


@given(
    cost_profiles(), floats(min_value=1e-3, max_value=10.0), floats(min_value=1e-3, max_value=10.0)
)
def test_aggregate_x_monotone(costs: CostProfile, first: float, second: float) -> None:
    low, high = sorted((first, second))

    assert aggregate_x(costs, low) <= aggregate_x(costs, high)
    assert aggregate_x(costs, high) < costs.count


def test_cost_profile_sorts_and_keeps_order() -> None:
    costs = CostProfile.from_costs([0.8, 0.1, 0.5])

    assert costs.costs == (0.1, 0.5, 0.8)
    assert costs.order == (1, 2, 0)

    assert costs.to_input_order(("a", "b", "c")) == ("c", "a", "b")
    assert costs.from_input_order(("c", "a", "b")) == ("a", "b", "c")


def test_cost_profile_stable_on_ties() -> None:
    costs = CostProfile.from_costs([0.5, 0.1, 0.5])

    assert costs.order == (1, 0, 2)


def test_cost_profile_validation() -> None:
    for values in ([0.1], [], [0.0, 0.1], [-0.1, 0.1], [float("inf"), 0.1], [float("nan"), 0.1]):
        with raises(DomainError):
            CostProfile.from_costs(values)

    with raises(DomainError):
        CostProfile((0.5, 0.1), (0, 1))

    with raises(DomainError):
        CostProfile((0.1, 0.5), (0, 0))


def test_cost_profile_revalue() -> None:
    costs = CostProfile.from_costs([0.8, 0.2]).revalue(RevaluationFactor(2.0))

    assert costs.costs == (0.1, 0.4)
    assert costs.order == (1, 0)


def test_reward_params_validation() -> None:
    for peg in (0.0, -1.0, float("inf"), float("nan")):
        with raises(DomainError):
            RewardParams(peg)

    for decay in (-0.5, float("inf")):
        with raises(DomainError):
            RewardParams(1.0, decay)

    with raises(DomainError):
        RevaluationFactor(0.0)

    assert RewardParams(1.0, 0.0).is_static()
    assert ONE.with_decay(2.0) == RewardParams(1.0, 2.0)
    assert ONE.with_peg(4.0).bound == 0.25


def test_hashrate_profile() -> None:
    profile = HashrateProfile((0.25, 0.0, 0.5))

    assert profile.total == 0.75
    assert profile.others_total(0) == 0.5
    assert profile.participants() == (0, 2)

    replaced = profile.replace(1, 0.25)

    assert replaced.hashrates == (0.25, 0.25, 0.5)
    assert replaced.total == 1.0

    with raises(DomainError):
        HashrateProfile((0.1, -0.1))


@given(integers(min_value=2, max_value=50), floats(min_value=0.01, max_value=2.0))
def test_homogeneous(count: int, cost: float) -> None:
    costs = CostProfile.homogeneous(count, cost)

    assert costs.count == count
    assert costs.is_homogeneous()
