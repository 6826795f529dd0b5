"""Numeric tolerances and defaults."""

from __future__ import annotations

from attrs import evolve, field, frozen
from attrs.validators import ge, gt
from typing_extensions import Self

__all__ = (
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "DEFAULT_SEED",
    "DEFAULT_MAX_ITERATIONS",
    "MONOPOLY_FRACTION",
)

DEFAULT_SEED = 42
"""The seed used whenever none is given."""

DEFAULT_MAX_ITERATIONS = 500
"""The default sweep budget of best-response dynamics."""

MONOPOLY_FRACTION = 1e-9
"""The purchase (relative to `Q`) offered to a miner facing no opponents."""


@frozen()
class Tolerances:
    """Every numeric knob of the solver, the verifier and the attack analyses."""

    boundary: float = field(default=1e-12, validator=ge(0.0))
    """Distance of `c*` or `c†` to `1/Q` resolved to the closed `AtQ` case."""

    threshold: float = field(default=1e-10, validator=ge(0.0))
    """Allowed residual of `X(c) = target` at a solved threshold."""

    epsilon: float = field(default=1e-6, validator=ge(0.0))
    """Largest utility improvement tolerated by the verifier."""

    bisection: float = field(default=1e-12, validator=gt(0.0))
    """Relative tolerance of every bisection."""

    bisection_iterations: int = field(default=200, validator=ge(1))
    """Iteration cap of every bisection."""

    grid_steps: int = field(default=10_000, validator=ge(1))
    """Number of grid intervals used by the deviation oracle."""

    profit: float = field(default=1e-12, validator=ge(0.0))
    """Margin an attack must beat the baseline by to count as profitable."""

    at_q: float = field(default=1e-9, validator=ge(0.0))
    """Relative distance of the total hashrate to `Q` treated as exactly `Q`."""

    movement: float = field(default=1e-9, validator=ge(0.0))
    """Largest hashrate change, relative to `max(H, 1)`, in the last sweep of converged dynamics."""

    def with_epsilon(self, epsilon: float) -> Self:
        return evolve(self, epsilon=epsilon)


DEFAULT_TOLERANCES = Tolerances()
"""The default [`Tolerances`][happymine.config.Tolerances]."""
