from __future__ import annotations

from math import isclose

import numpy as np
from hypothesis import given
from hypothesis.strategies import integers
from pytest import raises

from happymine.attacks import (
    CollusionScenario,
    collusion_report,
    identity_best_response,
    split_gain,
    sybil_report,
)
from happymine.errors import DomainError, UnsupportedError
from happymine.model import CostProfile, HashrateProfile, RewardParams
from happymine.solver import Regime

ONE = RewardParams(peg=1.0, decay=1.0)
STATIC = RewardParams(peg=1.0, decay=0.0)

COUNT = 20
COLLUDERS = range(2, 11)
COSTS = (0.99, 0.92, 0.5)

SYBIL_COUNT = 5
SYBIL_COST = 0.5
IDENTITIES = range(1, 11)

SEED = 7
PROFILES = 100


def test_collusion_unprofitable() -> None:
    for cost in COSTS:
        for colluders in COLLUDERS:
            report = collusion_report(CollusionScenario(COUNT, cost, colluders, ONE))

            assert not report.profitable
            assert report.attack_utility < report.baseline_utility


def test_collusion_regimes() -> None:
    regimes = {
        collusion_report(CollusionScenario(COUNT, cost, 2, ONE)).regime_before for cost in COSTS
    }

    assert regimes == set(Regime)


def test_collusion_large_coalitions() -> None:
    # baseline `1 / 100`; the coalition of `k` shares `1 / (11 - k)^2`
    assert not collusion_report(CollusionScenario(10, 0.99, 5, ONE)).profitable
    assert not collusion_report(CollusionScenario(10, 0.99, 7, ONE)).profitable

    report = collusion_report(CollusionScenario(10, 0.99, 8, ONE))

    assert report.profitable
    assert isclose(report.baseline_utility, 1.0 / 100.0)
    assert isclose(report.attack_utility, 1.0 / 72.0)


def test_collusion_of_everyone() -> None:
    report = collusion_report(CollusionScenario(10, 0.99, 10, ONE))

    assert report.attack_utility == 0.1
    assert report.regime_after is Regime.BELOW_Q
    assert report.profitable


def test_collusion_scenario_validation() -> None:
    with raises(DomainError):
        CollusionScenario(1, 0.5, 2, ONE)

    with raises(DomainError):
        CollusionScenario(5, 0.0, 2, ONE)

    for colluders in (1, 6):
        with raises(DomainError):
            CollusionScenario(5, 0.5, colluders, ONE)


def test_collusion_scenario_from_profile() -> None:
    scenario = CollusionScenario.from_profile(CostProfile.homogeneous(5, 0.5), 3, ONE)

    assert scenario == CollusionScenario(5, 0.5, 3, ONE)
    assert scenario.remaining == 3

    with raises(UnsupportedError):
        CollusionScenario.from_profile(CostProfile.from_costs([0.5, 0.6]), 2, ONE)


def test_sybil_shift_static() -> None:
    baseline = 1.0 / SYBIL_COUNT**2

    utilities = {}

    for identities in IDENTITIES:
        report = sybil_report(SYBIL_COUNT, SYBIL_COST, identities, STATIC)

        shift = report.shift

        expected = identities / (SYBIL_COUNT + identities - 1) ** 2

        assert isclose(shift.baseline_utility, baseline, rel_tol=1e-9)
        assert isclose(shift.attack_utility, expected, rel_tol=1e-9)

        assert shift.profitable == (identities >= 2)

        assert report.split_gain == 0.0

        utilities[identities] = shift.attack_utility

    assert max(utilities, key=utilities.__getitem__) == SYBIL_COUNT - 1


def test_sybil_validation() -> None:
    with raises(DomainError):
        sybil_report(1, SYBIL_COST, 2, STATIC)

    with raises(DomainError):
        sybil_report(SYBIL_COUNT, SYBIL_COST, 0, STATIC)


def test_split_gain_is_zero() -> None:
    generator = np.random.default_rng(SEED)

    for _ in range(PROFILES):
        count = int(generator.integers(2, 20))

        profile = HashrateProfile.from_iterable(generator.uniform(0.01, 5.0, count).tolist())
        costs = CostProfile.from_costs(generator.uniform(0.01, 2.0, count).tolist())

        weights = generator.uniform(0.0, 1.0, 4).tolist()

        for params in (ONE, STATIC, RewardParams(10.0, 3.0)):
            assert split_gain(0, profile, costs, params, weights) == 0.0
            assert split_gain(count - 1, profile, costs, params) == 0.0


def test_split_gain_validation() -> None:
    profile = HashrateProfile((0.0, 1.0))
    costs = CostProfile.from_costs([0.5, 0.5])

    with raises(DomainError):
        split_gain(0, profile, costs, ONE)

    for weights in ([0.0, 0.0], [-1.0, 2.0], [float("inf"), 1.0]):
        with raises(DomainError):
            split_gain(1, profile, costs, ONE, weights)


@given(integers(min_value=1, max_value=1000))
def test_identity_best_response(others: int) -> None:
    assert identity_best_response(others) == others


def test_identity_best_response_validation() -> None:
    with raises(DomainError):
        identity_best_response(0)
