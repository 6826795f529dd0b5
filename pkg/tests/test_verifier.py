from __future__ import annotations

from math import isclose
from typing import Tuple

import numpy as np
from pytest import raises

from happymine.config import DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCES, MONOPOLY_FRACTION
from happymine.errors import DomainError
from happymine.model import CostProfile, HashrateProfile, RewardParams
from happymine.solver import Regime, Selection, solve_equilibrium, solve_static
from happymine.verifier import (
    CandidateKind,
    Order,
    best_response,
    best_response_dynamics,
    grid_oracle,
    utility_gap,
    verify_equilibrium,
)

ONE = RewardParams(peg=1.0, decay=1.0)

LADDER_COSTS = CostProfile.from_costs([index / (index + 1) for index in range(1, 41)])

SEED = 42
INSTANCES = 200

EPSILON = 1e-6

HOMOGENEOUS_COUNT = 4
HOMOGENEOUS_COST = 0.9
HOMOGENEOUS_HASHRATE = 3.0 / (16.0 * 0.9)

LADDER_PARTICIPANTS = 25
LADDER_MAX_ITERATIONS = 5_000

DYNAMICS_INSTANCES = 20
DYNAMICS_MAX_ITERATIONS = 200


def test_best_response_below_q() -> None:
    params = RewardParams(peg=1e6, decay=0.0)

    response = best_response(1.0, 0.25, params)

    assert response.hashrate == 1.0
    assert isclose(response.utility, 0.25)

    kinds = {candidate.kind for candidate in response.candidates}

    assert CandidateKind.ZERO in kinds
    assert CandidateKind.BELOW_STATIONARY in kinds


def test_best_response_peg_boundary() -> None:
    others_total = 0.6451

    response = best_response(others_total, 0.5, ONE)

    assert isclose(response.hashrate, 1.0 - others_total)

    best = max(response.candidates, key=lambda candidate: candidate.utility)

    assert best.kind is CandidateKind.PEG_BOUNDARY


def test_best_response_stays_out() -> None:
    # `Q^d / H_{-i}^(d + 1) = 1 / 4` is below the cost
    response = best_response(2.0, 0.3, ONE)

    assert response.hashrate == 0.0
    assert response.utility == 0.0


def test_best_response_above_q() -> None:
    # the ladder equilibrium is above `Q`; every participant is already best-responding
    equilibrium = solve_equilibrium(LADDER_COSTS, ONE)

    profile = equilibrium.profile

    for index in equilibrium.participants:
        response = best_response(profile.others_total(index), LADDER_COSTS.costs[index], ONE)

        assert abs(response.hashrate - profile.hashrates[index]) <= 1e-9


def test_best_response_against_nobody() -> None:
    response = best_response(0.0, 0.5, ONE)

    assert response.hashrate == MONOPOLY_FRACTION
    assert response.utility > 0.0


def test_best_response_domain() -> None:
    with raises(DomainError):
        best_response(-1.0, 0.5, ONE)

    with raises(DomainError):
        best_response(1.0, 0.0, ONE)


def test_grid_oracle_finds_no_improvement_at_equilibrium() -> None:
    equilibrium = solve_equilibrium(LADDER_COSTS, ONE)

    for index in range(LADDER_COSTS.count):
        oracle = grid_oracle(index, equilibrium.profile, LADDER_COSTS, ONE)

        assert oracle.improvement <= EPSILON


def test_verify_pair_both_selections() -> None:
    costs = CostProfile.from_costs([0.1, 0.8])

    for selection in Selection:
        equilibrium = solve_equilibrium(costs, ONE, selection)

        report = verify_equilibrium(equilibrium, costs, ONE)

        assert report.passed
        assert not report.failures()


def test_verify_perturbed_profile_fails() -> None:
    equilibrium = solve_equilibrium(LADDER_COSTS, ONE)

    hashrates = equilibrium.hashrates

    profile = equilibrium.profile.replace(0, 1.5 * hashrates[0])

    report = verify_equilibrium(profile, LADDER_COSTS, ONE)

    assert not report.passed

    (failure, *_) = report.failures()

    assert failure.index == 0
    assert failure.improvement > 0.0


def test_verify_static_profile_under_decay_fails() -> None:
    static = solve_static(LADDER_COSTS)

    assert not verify_equilibrium(static.profile, LADDER_COSTS, ONE).passed
    assert verify_equilibrium(static.profile, LADDER_COSTS, RewardParams(1.0, 0.0)).passed


def test_verify_zero_profile_fails() -> None:
    report = verify_equilibrium(HashrateProfile.zeros(2), CostProfile.from_costs([0.1, 0.8]), ONE)

    assert not report.passed

    for verdict in report.verdicts:
        assert verdict.left.is_null()
        assert verdict.right.is_null()


def random_instance(generator: np.random.Generator) -> Tuple[CostProfile, RewardParams]:
    count = int(generator.integers(2, 51))

    costs = CostProfile.from_costs(generator.uniform(0.01, 2.0, count).tolist())

    params = RewardParams(float(generator.uniform(0.1, 10.0)), float(generator.uniform(0.0, 5.0)))

    return costs, params


def test_verify_random_instances() -> None:
    generator = np.random.default_rng(SEED)

    regimes = set()

    for _ in range(INSTANCES):
        costs, params = random_instance(generator)

        equilibrium = solve_equilibrium(costs, params)

        regimes.add(equilibrium.regime)

        assert verify_equilibrium(equilibrium, costs, params, EPSILON).passed

        if equilibrium.regime is Regime.AT_Q:
            utilitarian = solve_equilibrium(costs, params, Selection.UTILITARIAN)

            assert verify_equilibrium(utilitarian, costs, params, EPSILON).passed

    assert Regime.BELOW_Q in regimes


def test_utility_gap_at_equilibrium() -> None:
    equilibrium = solve_equilibrium(LADDER_COSTS, ONE)

    assert utility_gap(equilibrium.profile, LADDER_COSTS, ONE) <= 1e-12


def test_dynamics_converge_homogeneous() -> None:
    costs = CostProfile.homogeneous(HOMOGENEOUS_COUNT, HOMOGENEOUS_COST)

    trace = best_response_dynamics(HashrateProfile.zeros(HOMOGENEOUS_COUNT), costs, ONE)

    assert trace.converged
    assert trace.iterations <= DEFAULT_MAX_ITERATIONS
    assert trace.final_gap <= 1e-12
    assert trace.iterations == len(trace.gaps) - 1

    for hashrate in trace.final.hashrates:
        assert abs(hashrate - HOMOGENEOUS_HASHRATE) <= 1e-6

    assert verify_equilibrium(trace.final, costs, ONE).passed


def test_dynamics_start_at_equilibrium() -> None:
    costs = CostProfile.homogeneous(HOMOGENEOUS_COUNT, HOMOGENEOUS_COST)

    equilibrium = solve_equilibrium(costs, ONE)

    trace = best_response_dynamics(equilibrium.profile, costs, ONE)

    assert trace.converged
    assert trace.iterations == 1

    movement = DEFAULT_TOLERANCES.movement

    for iterate in trace.iterates:
        for before, after in zip(equilibrium.hashrates, iterate.hashrates):
            assert abs(before - after) <= movement


def test_dynamics_converge_ladder() -> None:
    initial = HashrateProfile.zeros(LADDER_COSTS.count)

    trace = best_response_dynamics(
        initial, LADDER_COSTS, ONE, max_iterations=LADDER_MAX_ITERATIONS
    )

    assert trace.converged
    assert len(trace.final.participants()) == LADDER_PARTICIPANTS

    assert verify_equilibrium(trace.final, LADDER_COSTS, ONE, epsilon=EPSILON).passed

    equilibrium = solve_equilibrium(LADDER_COSTS, ONE)

    for expected, hashrate in zip(equilibrium.hashrates, trace.final.hashrates):
        assert abs(hashrate - expected) <= 1e-6


def test_dynamics_converged_traces_verify() -> None:
    generator = np.random.default_rng(SEED)

    converged = 0

    for _ in range(DYNAMICS_INSTANCES):
        count = int(generator.integers(2, 9))

        costs = CostProfile.from_costs(generator.uniform(0.01, 2.0, count).tolist())

        params = RewardParams(
            peg=float(generator.uniform(0.1, 10.0)), decay=float(generator.uniform(0.0, 3.0))
        )

        trace = best_response_dynamics(
            HashrateProfile.zeros(count), costs, params, max_iterations=DYNAMICS_MAX_ITERATIONS
        )

        if trace.converged:
            converged += 1

            assert verify_equilibrium(trace.final, costs, params, epsilon=EPSILON).passed

    assert converged


def test_dynamics_random_order_is_deterministic() -> None:
    costs = CostProfile.from_costs([0.3, 0.5, 0.9])
    initial = HashrateProfile.zeros(costs.count)

    first = best_response_dynamics(initial, costs, ONE, Order.RANDOM, seed=7, max_iterations=20)
    second = best_response_dynamics(initial, costs, ONE, Order.RANDOM, seed=7, max_iterations=20)

    assert first == second


def test_dynamics_budget() -> None:
    costs = CostProfile.homogeneous(HOMOGENEOUS_COUNT, HOMOGENEOUS_COST)
    initial = HashrateProfile.zeros(HOMOGENEOUS_COUNT)

    trace = best_response_dynamics(initial, costs, ONE, max_iterations=1, tolerance=0.0)

    assert trace.iterations == 1

    with raises(DomainError):
        best_response_dynamics(initial, costs, ONE, max_iterations=0)
