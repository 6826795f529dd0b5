"""Optimal purchase of a new miner.

The setting is normalized: incumbents hold a total hashrate of `1`, which is also the peg `Q`,
so an entrant buying `q` receives `q / (q + 1)^(delta + 1)`. The optimum solves

```text
c = (1 - delta * q) / (q + 1)^(delta + 2)
```

on `[0, 1 / delta)`, and shrinks as `delta` grows.

Example:
    ```python
    from happymine import new_miner_optimum

    assert new_miner_optimum(0.25, 0.0).unwrap() == 1.0
    assert new_miner_optimum(0.25, 1.0).unwrap() < 1.0
    ```
"""

from __future__ import annotations

from math import isfinite, sqrt

from scipy.optimize import bisect
from wraps import Err, Ok, Result

from happymine.config import DEFAULT_TOLERANCES, Tolerances
from happymine.errors import DomainError, NoEntry

__all__ = ("new_miner_optimum", "entry_utility", "entry_marginal", "entry_curvature")

POSITIVE = "expected finite positive value"
NON_NEGATIVE = "expected finite non-negative value"

TINY = 1e-300


def check_decay(decay: float) -> None:
    if not (isfinite(decay) and decay >= 0.0):
        raise DomainError("decay", decay, NON_NEGATIVE)


def entry_utility(hashrate: float, cost: float, decay: float) -> float:
    """Computes `q / (q + 1)^(delta + 1) - c * q`."""
    return hashrate / (hashrate + 1.0) ** (decay + 1.0) - cost * hashrate


def entry_marginal(hashrate: float, cost: float, decay: float) -> float:
    """Computes `(1 - delta * q) / (q + 1)^(delta + 2) - c`."""
    return (1.0 - decay * hashrate) / (hashrate + 1.0) ** (decay + 2.0) - cost


def entry_curvature(hashrate: float, decay: float) -> float:
    """Computes the second derivative of the entrant utility.

    It is `(q delta^2 + q delta - 2 delta - 2) / (q + 1)^(delta + 3)`, negative whenever
    `q delta < 2`.
    """
    return (hashrate * decay * decay + hashrate * decay - 2.0 * decay - 2.0) / (
        hashrate + 1.0
    ) ** (decay + 3.0)


def new_miner_optimum(
    cost: float, decay: float, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> Result[float, NoEntry]:
    """Computes the optimal purchase `q*` of an entrant with unit `cost`.

    Arguments:
        cost: The entrant cost, relative to the normalized reward.
        decay: The decay exponent `delta`.
        tolerances: The numeric tolerances.

    Raises:
        DomainError: `cost` is not positive or `decay` is negative.

    Returns:
        The optimum wrapped in [`Ok`][wraps.result.Ok], or [`NoEntry`][happymine.errors.NoEntry]
            wrapped in [`Err`][wraps.result.Err] when `cost >= 1`.
    """
    if not (isfinite(cost) and cost > 0.0):
        raise DomainError("cost", cost, POSITIVE)

    check_decay(decay)

    if cost >= 1.0:
        return Err(NoEntry(cost))

    if not decay:
        return Ok(sqrt(1.0 / cost) - 1.0)

    root = bisect(
        entry_marginal,
        0.0,
        1.0 / decay,
        args=(cost, decay),
        xtol=TINY,
        rtol=tolerances.bisection,
        maxiter=tolerances.bisection_iterations,
        disp=False,
    )

    return Ok(float(root))
