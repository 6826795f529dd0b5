"""Numerical audit of the properties of proportional allocation.

The audit works on any profile with positive total hashrate; it splits and merges miners
in place and compares the rewards before and after, up to a tolerance.
"""

from __future__ import annotations

from itertools import combinations
from typing import List

from attrs import field, frozen

from happymine.model import HashrateProfile, RewardParams, allocation, left_to_right_sum
from happymine.typing import Hashrates

__all__ = ("AllocationAudit", "audit_allocation", "allocations")

DEFAULT_TOLERANCE = 1e-12
SPLIT = 2


@frozen()
class AllocationAudit:
    """One flag per property of the allocation rule."""

    non_negative: bool = field()
    """Every miner receives a non-negative reward."""

    budget_balanced: bool = field()
    """The rewards sum to at most `1`."""

    symmetric: bool = field()
    """Miners with equal hashrate receive equal rewards."""

    sybil_proof: bool = field()
    """Splitting a miner into identities leaves its aggregate reward unchanged."""

    collusion_proof: bool = field()
    """Merging two miners leaves their aggregate reward unchanged."""

    @property
    def passed(self) -> bool:
        return (
            self.non_negative
            and self.budget_balanced
            and self.symmetric
            and self.sybil_proof
            and self.collusion_proof
        )


def allocations(profile: HashrateProfile, params: RewardParams) -> Hashrates:
    return tuple(allocation(index, profile, params) for index in range(profile.count))


def split(hashrates: Hashrates, index: int, parts: int) -> Hashrates:
    piece = hashrates[index] / parts

    return hashrates[:index] + (piece,) * parts + hashrates[index + 1 :]


def merge(hashrates: Hashrates, first: int, second: int) -> Hashrates:
    merged: List[float] = [hashrates[first] + hashrates[second]]

    merged.extend(
        hashrate for index, hashrate in enumerate(hashrates) if index not in (first, second)
    )

    return tuple(merged)


def audit_allocation(
    profile: HashrateProfile, params: RewardParams, tolerance: float = DEFAULT_TOLERANCE
) -> AllocationAudit:
    """Audits the allocation rule at `profile`.

    Raises:
        DomainError: The total hashrate is zero.
    """
    rewards = allocations(profile, params)
    hashrates = profile.hashrates

    non_negative = all(value >= 0.0 for value in rewards)

    budget_balanced = left_to_right_sum(rewards) <= 1.0 + tolerance

    symmetric = all(
        abs(rewards[first] - rewards[second]) <= tolerance
        for first, second in combinations(range(profile.count), 2)
        if hashrates[first] == hashrates[second]
    )

    sybil_proof = True

    for index in range(profile.count):
        pieces = allocations(HashrateProfile(split(hashrates, index, SPLIT)), params)

        gathered = left_to_right_sum(pieces[index : index + SPLIT])

        if abs(gathered - rewards[index]) > tolerance:
            sybil_proof = False
            break

    collusion_proof = True

    for first, second in combinations(range(profile.count), 2):
        merged = allocation(0, HashrateProfile(merge(hashrates, first, second)), params)

        if abs(merged - (rewards[first] + rewards[second])) > tolerance:
            collusion_proof = False
            break

    return AllocationAudit(
        non_negative=non_negative,
        budget_balanced=budget_balanced,
        symmetric=symmetric,
        sybil_proof=sybil_proof,
        collusion_proof=collusion_proof,
    )
