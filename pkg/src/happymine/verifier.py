"""Independent numerical certification of equilibria.

Nothing here relies on the closed forms of [`solver`][happymine.solver]: best responses are
found by comparing every stationary and boundary candidate of a single miner's utility, and the
deviation oracle simply evaluates utility on a dense grid.
"""

from __future__ import annotations

import logging
from enum import Enum
from math import sqrt
from typing import List, Optional, Union

import numpy as np
from attrs import field, frozen
from numpy.typing import NDArray
from scipy.optimize import bisect
from typing_aliases import DynamicTuple
from wraps import NULL, Option, Some

from happymine.config import (
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_SEED,
    DEFAULT_TOLERANCES,
    MONOPOLY_FRACTION,
    Tolerances,
)
from happymine.errors import DomainError
from happymine.model import (
    CostProfile,
    HashrateProfile,
    RewardParams,
    branch_derivative,
    payoff,
)
from happymine.solver import Equilibrium

__all__ = (
    # types
    "CandidateKind",
    "Candidate",
    "BestResponseResult",
    "OracleResult",
    "MinerVerdict",
    "VerificationReport",
    "Order",
    "DynamicsTrace",
    # operations
    "best_response",
    "grid_oracle",
    "verify_equilibrium",
    "best_response_dynamics",
    "utility_gap",
)

logger = logging.getLogger(__name__)

MAX_DOUBLINGS = 128
SPAN_FACTOR = 2.0

NON_NEGATIVE = "expected non-negative value"
POSITIVE = "expected positive value"
AT_LEAST_ONE = "expected at least one iteration"


class CandidateKind(Enum):
    """The origin of a best-response candidate."""

    ZERO = "zero"
    MONOPOLY = "monopoly"
    BELOW_STATIONARY = "below_stationary"
    PEG_BOUNDARY = "peg_boundary"
    ABOVE_STATIONARY = "above_stationary"


@frozen()
class Candidate:
    kind: CandidateKind = field()
    hashrate: float = field()
    utility: float = field()


@frozen()
class BestResponseResult:
    """The utility-maximizing purchase of one miner against fixed opponents."""

    hashrate: float = field()
    """The maximizing hashrate `q*`."""

    utility: float = field()
    """The utility at `q*`."""

    candidates: DynamicTuple[Candidate] = field()
    """Every evaluated stationary and boundary point."""


@frozen()
class OracleResult:
    """The outcome of the exhaustive deviation search of one miner."""

    hashrate: float = field()
    """The best deviation found."""

    utility: float = field()
    """The utility of the best deviation."""

    current: float = field()
    """The utility of the current hashrate."""

    @property
    def improvement(self) -> float:
        return self.utility - self.current


@frozen()
class MinerVerdict:
    index: int = field()
    hashrate: float = field()
    improvement: float = field()
    left: Option[float] = field()
    """The left derivative, absent when the total hashrate is zero."""
    right: Option[float] = field()
    """The right derivative, absent when the total hashrate is zero."""
    passed: bool = field()


@frozen()
class VerificationReport:
    """Per-miner verdicts; failures are reported, never raised."""

    epsilon: float = field()
    verdicts: DynamicTuple[MinerVerdict] = field()

    @property
    def passed(self) -> bool:
        return all(verdict.passed for verdict in self.verdicts)

    def failures(self) -> DynamicTuple[MinerVerdict]:
        return tuple(verdict for verdict in self.verdicts if not verdict.passed)


class Order(Enum):
    """The order in which miners update during best-response dynamics."""

    ROUND_ROBIN = "round-robin"
    RANDOM = "random"


@frozen()
class DynamicsTrace:
    """Every profile visited by best-response dynamics, one per sweep."""

    iterates: DynamicTuple[HashrateProfile] = field()
    gaps: DynamicTuple[float] = field()
    """The largest available utility improvement at each iterate."""
    converged: bool = field()

    @property
    def final(self) -> HashrateProfile:
        return self.iterates[-1]

    @property
    def final_gap(self) -> float:
        return self.gaps[-1]

    @property
    def iterations(self) -> int:
        return len(self.iterates) - 1


def above_stationary(
    others_total: float,
    cost: float,
    params: RewardParams,
    tolerances: Tolerances,
    span: float,
) -> Option[float]:
    """Finds the stationary purchase on the branch where the total exceeds `Q`.

    The marginal utility on that branch is decreasing wherever it is positive,
    so it changes sign at most once and bisection applies.
    """
    start = max(params.peg - others_total, 0.0)

    def marginal(hashrate: float) -> float:
        return branch_derivative(hashrate, others_total + hashrate, cost, params, above=True)

    if marginal(start) <= 0.0:
        return NULL

    end = max(span, 2.0 * start)

    for _ in range(MAX_DOUBLINGS):
        if marginal(end) < 0.0:
            break

        end *= 2.0

    else:
        logger.debug("no sign change of the marginal utility up to %r", end)

        return NULL

    root = bisect(
        marginal,
        start,
        end,
        xtol=np.finfo(float).tiny,
        rtol=tolerances.bisection,
        maxiter=tolerances.bisection_iterations,
        disp=False,
    )

    return Some(float(root))


def best_response(
    others_total: float,
    cost: float,
    params: RewardParams,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    span: Optional[float] = None,
) -> BestResponseResult:
    """Computes the best purchase of a miner with `cost` against `others_total`.

    The candidates are buying nothing, the stationary point below `Q`
    (`sqrt(H_{-i} / c) - H_{-i}`), the purchase landing exactly on `Q`, and the stationary
    point above `Q`, found by bisection. Against an empty system the supremum is not attained,
    so the smallest positive purchase `MONOPOLY_FRACTION * Q` stands in for it.

    Raises:
        DomainError: `others_total` is negative or `cost` is not positive.
    """
    if not others_total >= 0.0:
        raise DomainError("others_total", others_total, NON_NEGATIVE)

    if not cost > 0.0:
        raise DomainError("cost", cost, POSITIVE)

    peg = params.peg

    if span is None:
        span = SPAN_FACTOR * max(others_total, peg)

    candidates = [Candidate(CandidateKind.ZERO, 0.0, 0.0)]

    def consider(kind: CandidateKind, hashrate: float) -> None:
        candidates.append(Candidate(kind, hashrate, payoff(hashrate, others_total, cost, params)))

    if others_total > 0.0:
        stationary = sqrt(others_total / cost) - others_total

        if stationary > 0.0 and others_total + stationary < peg:
            consider(CandidateKind.BELOW_STATIONARY, stationary)

    else:
        consider(CandidateKind.MONOPOLY, MONOPOLY_FRACTION * peg)

    boundary = peg - others_total

    if boundary > 0.0:
        consider(CandidateKind.PEG_BOUNDARY, boundary)

    above_stationary(others_total, cost, params, tolerances, span).map_or(
        None, lambda hashrate: consider(CandidateKind.ABOVE_STATIONARY, hashrate)
    )

    best = max(candidates, key=lambda candidate: candidate.utility)

    return BestResponseResult(best.hashrate, best.utility, tuple(candidates))


def grid_payoffs(
    hashrates: NDArray[np.float64], others_total: float, cost: float, params: RewardParams
) -> NDArray[np.float64]:
    peg = params.peg

    totals = others_total + hashrates

    with np.errstate(divide="ignore", invalid="ignore"):
        rewards = np.where(totals > peg, (peg / totals) ** params.decay, 1.0)
        shares = np.where(hashrates > 0.0, hashrates / totals, 0.0)

    result: NDArray[np.float64] = shares * rewards - cost * hashrates

    return result


def grid_oracle(
    index: int,
    profile: HashrateProfile,
    costs: CostProfile,
    params: RewardParams,
    span: Optional[float] = None,
    steps: Optional[int] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> OracleResult:
    """Searches the best deviation of miner `index` exhaustively.

    Evaluates utility on `steps + 1` evenly spaced hashrates in `[0, span]` along with the
    exact points `Q - H_{-i}` and the current hashrate. `span` defaults to
    `2 max(H, Q)`.
    """
    peg = params.peg

    if span is None:
        span = SPAN_FACTOR * max(profile.total, peg)

    if steps is None:
        steps = tolerances.grid_steps

    others_total = profile.others_total(index)
    current = profile.hashrates[index]
    cost = costs.costs[index]

    exact = [current]

    boundary = peg - others_total

    if boundary >= 0.0:
        exact.append(boundary)

    points = np.concatenate((np.linspace(0.0, span, steps + 1), np.array(exact)))

    utilities = grid_payoffs(points, others_total, cost, params)

    best = int(np.argmax(utilities))

    return OracleResult(
        hashrate=float(points[best]),
        utility=float(utilities[best]),
        current=payoff(current, others_total, cost, params),
    )


def verify_equilibrium(
    equilibrium: Union[Equilibrium, HashrateProfile],
    costs: CostProfile,
    params: RewardParams,
    epsilon: Optional[float] = None,
    span: Optional[float] = None,
    steps: Optional[int] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> VerificationReport:
    """Certifies `equilibrium` as an `epsilon`-equilibrium.

    A miner passes when the grid oracle finds no deviation improving its utility by more than
    `epsilon` and the first-order conditions hold: participants have a vanishing derivative
    (or, at `H = Q`, a non-negative left and non-positive right derivative), and
    non-participants have a non-positive right derivative at zero.
    """
    profile = equilibrium.profile if isinstance(equilibrium, Equilibrium) else equilibrium

    if epsilon is None:
        epsilon = tolerances.epsilon

    total = profile.total
    peg = params.peg

    at_q = abs(total - peg) <= tolerances.at_q * peg

    verdicts = []

    for index, hashrate in enumerate(profile.hashrates):
        oracle = grid_oracle(index, profile, costs, params, span, steps, tolerances)

        improvement = oracle.improvement

        if total > 0.0:
            cost = costs.costs[index]

            left = branch_derivative(hashrate, total, cost, params, above=(not at_q) and total > peg)
            right = branch_derivative(hashrate, total, cost, params, above=at_q or total > peg)

            if not hashrate:
                signs = right <= epsilon

            elif at_q:
                signs = left >= -epsilon and right <= epsilon

            else:
                signs = abs(left) <= epsilon

            verdicts.append(
                MinerVerdict(
                    index=index,
                    hashrate=hashrate,
                    improvement=improvement,
                    left=Some(left),
                    right=Some(right),
                    passed=signs and improvement <= epsilon,
                )
            )

        else:
            verdicts.append(
                MinerVerdict(
                    index=index,
                    hashrate=hashrate,
                    improvement=improvement,
                    left=NULL,
                    right=NULL,
                    passed=False,
                )
            )

    report = VerificationReport(epsilon, tuple(verdicts))

    logger.debug("verification %s at epsilon %r", "passed" if report.passed else "failed", epsilon)

    return report


def utility_gap(
    profile: HashrateProfile,
    costs: CostProfile,
    params: RewardParams,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Returns the largest utility improvement any single miner can get by best-responding."""
    gap = 0.0

    for index, hashrate in enumerate(profile.hashrates):
        others_total = profile.others_total(index)
        cost = costs.costs[index]

        response = best_response(others_total, cost, params, tolerances)

        gap = max(gap, response.utility - payoff(hashrate, others_total, cost, params))

    return gap


def best_response_dynamics(
    initial: HashrateProfile,
    costs: CostProfile,
    params: RewardParams,
    order: Order = Order.ROUND_ROBIN,
    seed: int = DEFAULT_SEED,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    tolerance: float = 1e-12,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> DynamicsTrace:
    """Runs sequential best-response dynamics from `initial`.

    Each iteration is one sweep updating every miner once, in index order or in a fresh random
    permutation drawn from `seed`. The dynamics converge once no miner can improve its utility
    by more than `tolerance`, no hashrate moved by more than `tolerances.movement` (relative to
    `max(H, 1)`) during the sweep, and the profile passes
    [`verify_equilibrium`][happymine.verifier.verify_equilibrium] under `tolerances`. Otherwise
    they stop when `max_iterations` sweeps are exhausted.

    The gap is quadratic in the distance to a best response, so on its own it does not bound
    first-order residuals.

    Raises:
        DomainError: `max_iterations` is less than one.
    """
    if max_iterations < 1:
        raise DomainError("max_iterations", max_iterations, AT_LEAST_ONE)

    generator = np.random.default_rng(seed)

    count = costs.count

    profile = initial

    iterates: List[HashrateProfile] = [profile]
    gaps: List[float] = [utility_gap(profile, costs, params, tolerances)]

    converged = False

    for iteration in range(max_iterations):
        if order is Order.RANDOM:
            sequence = [int(index) for index in generator.permutation(count)]

        else:
            sequence = list(range(count))

        previous = profile

        for index in sequence:
            response = best_response(
                profile.others_total(index), costs.costs[index], params, tolerances
            )

            profile = profile.replace(index, response.hashrate)

        gap = utility_gap(profile, costs, params, tolerances)

        movement = max(
            abs(after - before) for before, after in zip(previous.hashrates, profile.hashrates)
        )

        iterates.append(profile)
        gaps.append(gap)

        logger.debug("sweep %d: gap %r, movement %r", iteration + 1, gap, movement)

        settled = movement <= tolerances.movement * max(profile.total, 1.0)

        if (
            gap <= tolerance
            and settled
            and verify_equilibrium(profile, costs, params, tolerances=tolerances).passed
        ):
            converged = True
            break

    return DynamicsTrace(tuple(iterates), tuple(gaps), converged)
