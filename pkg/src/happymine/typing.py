"""Various type aliases."""

from __future__ import annotations

from typing import Any, Dict

from typing_aliases import DynamicTuple

__all__ = ("Costs", "Hashrates", "Indices", "Utilities", "Document")

Costs = DynamicTuple[float]
"""Represents per-unit hashrate costs, in reward units per hashrate unit."""

Hashrates = DynamicTuple[float]
"""Represents per-miner hashrates."""

Indices = DynamicTuple[int]
"""Represents miner indices (positions in the sorted cost order unless stated otherwise)."""

Utilities = DynamicTuple[float]
"""Represents per-miner utilities."""

Document = Dict[str, Any]
"""Represents JSON-compatible documents."""
