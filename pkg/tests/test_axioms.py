from __future__ import annotations

from hypothesis import given
from hypothesis.strategies import DrawFn, composite, floats, lists
from pytest import raises

from happymine.axioms import audit_allocation
from happymine.errors import DomainError
from happymine.model import HashrateProfile, RewardParams


@composite
def profiles(draw: DrawFn) -> HashrateProfile:
    hashrates = draw(lists(floats(min_value=0.0, max_value=100.0), min_size=2, max_size=10))

    hashrates[0] = max(hashrates[0], 1e-3)

    return HashrateProfile.from_iterable(hashrates)


@given(profiles(), floats(min_value=0.1, max_value=10.0), floats(min_value=0.0, max_value=5.0))
def test_audit_allocation_passes(profile: HashrateProfile, peg: float, decay: float) -> None:
    audit = audit_allocation(profile, RewardParams(peg, decay))

    assert audit.passed


def test_audit_allocation_symmetric_ties() -> None:
    audit = audit_allocation(HashrateProfile((0.5, 0.5, 0.0)), RewardParams(1.0, 1.0))

    assert audit.symmetric
    assert audit.budget_balanced
    assert audit.passed


def test_audit_allocation_zero_total() -> None:
    with raises(DomainError):
        audit_allocation(HashrateProfile.zeros(3), RewardParams(1.0, 1.0))
