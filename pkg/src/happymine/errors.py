"""Errors and expected negative outcomes.

Invalid input raises a subclass of [`HappyMineError`][happymine.errors.HappyMineError].

Outcomes that are part of the model rather than mistakes (no threshold exists, an entrant
can not profit, a market share is undefined) are returned as
[`Err[E]`][wraps.result.Err] values holding the frozen types defined here.
"""

from __future__ import annotations

from typing import Any

from attrs import field, frozen
from attrs.validators import ge
from wraps import ToString

__all__ = (
    # errors
    "HappyMineError",
    "DomainError",
    "UnsupportedError",
    # outcomes
    "NoThreshold",
    "NoEntry",
    "UndefinedShare",
)


class HappyMineError(Exception):
    """The root of all errors raised by `happymine`."""


DOMAIN_ERROR = "`{}` is outside of the domain ({!r}): {}"
domain_error = DOMAIN_ERROR.format


class DomainError(HappyMineError, ValueError):
    """Represents arguments outside of the domain of an operation."""

    def __init__(self, name: str, value: Any, reason: str) -> None:
        self._name = name
        self._value = value
        self._reason = reason

        super().__init__(domain_error(name, value, reason))

    @property
    def name(self) -> str:
        """The name of the offending argument."""
        return self._name

    @property
    def value(self) -> Any:
        """The offending value."""
        return self._value

    @property
    def reason(self) -> str:
        """The violated requirement."""
        return self._reason


class UnsupportedError(HappyMineError):
    """Represents analyses outside of the model, for instance heterogeneous collusion."""


NO_THRESHOLD = "no threshold with `X(c) = {}` exists for {} miners"
no_threshold = NO_THRESHOLD.format


@frozen()
class NoThreshold(ToString):
    """No finite threshold reaches the target since `X(c) < count <= target` everywhere."""

    count: int = field()
    """The number of miners."""

    target: float = field()
    """The requested level of `X`."""

    def to_string(self) -> str:
        return no_threshold(self.target, self.count)


NO_ENTRY = "an entrant with cost {} can not profit"
no_entry = NO_ENTRY.format


@frozen()
class NoEntry(ToString):
    """The entrant cost is at least the marginal reward at zero purchase."""

    cost: float = field()

    def to_string(self) -> str:
        return no_entry(self.cost)


UNDEFINED_SHARE = "miner {} does not participate"
undefined_share = UNDEFINED_SHARE.format


@frozen()
class UndefinedShare(ToString):
    """The relative market share is undefined since the miner does not participate."""

    index: int = field(validator=ge(0))

    def to_string(self) -> str:
        return undefined_share(self.index)
