"""Scenario files.

A scenario is a single JSON object:

```json
{
    "costs": [0.1, 0.8],
    "Q": 1.0,
    "delta": 1.0,
    "labels": ["cheap", "dear"],
    "seed": 42,
    "tol": 1e-6
}
```

`costs`, `Q` and `delta` are required; every other key is optional, and unknown keys are rejected.
"""

from __future__ import annotations

import json
from math import isfinite
from pathlib import Path
from typing import Any, Callable, Dict, List, TypeVar

from attrs import evolve, field, frozen
from typing_aliases import DynamicTuple
from typing_extensions import Self
from wraps import NULL, Err, FromString, Ok, Option, Result, Some, ToString

from happymine.config import DEFAULT_SEED
from happymine.model import CostProfile, RewardParams
from happymine.typing import Costs, Document

__all__ = ("Scenario", "ScenarioIssue")

T = TypeVar("T")

COSTS = "costs"
PEG = "Q"
DECAY = "delta"
LABELS = "labels"
SEED = "seed"
TOLERANCE = "tol"

REQUIRED = (COSTS, PEG, DECAY)
KEYS = (COSTS, PEG, DECAY, LABELS, SEED, TOLERANCE)

ROOT = "$"

MIN_MINERS = 2

EXPECTED_OBJECT = "expected JSON object"
MISSING_KEY = "missing required key"
UNKNOWN_KEY = "unknown key"
EXPECTED_NUMBER = "expected number"
EXPECTED_POSITIVE = "expected finite positive number"
EXPECTED_NON_NEGATIVE = "expected finite non-negative number"
EXPECTED_ARRAY = "expected array"
TOO_FEW_COSTS = "expected at least {} costs"
too_few_costs = TOO_FEW_COSTS.format
EXPECTED_STRING = "expected string"
DUPLICATE_LABEL = "duplicate label"
LABEL_COUNT = "expected {} labels, one per miner"
label_count = LABEL_COUNT.format
EXPECTED_SEED = "expected non-negative integer"

ISSUE_AT_LINE = "line {}, {}: {}"
issue_at_line = ISSUE_AT_LINE.format
ISSUE = "{}: {}"
issue = ISSUE.format


@frozen()
class ScenarioIssue(ToString):
    """Describes why a scenario could not be parsed."""

    path: str = field()
    """The offending field, `$` for the document itself."""

    message: str = field()

    line: Option[int] = field(default=NULL)
    """The line of JSON syntax errors."""

    def to_string(self) -> str:
        return self.line.map_or_else(
            lambda: issue(self.path, self.message),
            lambda line: issue_at_line(line, self.path, self.message),
        )


def index_path(key: str, index: int) -> str:
    return f"{key}[{index}]"


def is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def check_number(path: str, value: Any) -> Result[float, ScenarioIssue]:
    if not is_number(value):
        return Err(ScenarioIssue(path, EXPECTED_NUMBER))

    try:
        return Ok(float(value))

    except OverflowError:
        return Err(ScenarioIssue(path, EXPECTED_NUMBER))


def checking(
    path: str, predicate: Callable[[float], bool], message: str
) -> Callable[[float], Result[float, ScenarioIssue]]:
    def check(number: float) -> Result[float, ScenarioIssue]:
        if not (isfinite(number) and predicate(number)):
            return Err(ScenarioIssue(path, message))

        return Ok(number)

    return check


def check_positive(path: str, value: Any) -> Result[float, ScenarioIssue]:
    return check_number(path, value).and_then(
        checking(path, lambda number: number > 0.0, EXPECTED_POSITIVE)
    )


def check_non_negative(path: str, value: Any) -> Result[float, ScenarioIssue]:
    return check_number(path, value).and_then(
        checking(path, lambda number: number >= 0.0, EXPECTED_NON_NEGATIVE)
    )


def check_costs(value: Any) -> Result[Costs, ScenarioIssue]:
    if not isinstance(value, list):
        return Err(ScenarioIssue(COSTS, EXPECTED_ARRAY))

    if len(value) < MIN_MINERS:
        return Err(ScenarioIssue(COSTS, too_few_costs(MIN_MINERS)))

    costs: List[float] = []

    for index, item in enumerate(value):
        result = check_positive(index_path(COSTS, index), item)

        if result.is_err():
            return Err(result.unwrap_err())

        costs.append(result.unwrap())

    return Ok(tuple(costs))


def check_optional(
    data: Dict[str, Any], key: str, check: Callable[[Any], Result[T, ScenarioIssue]]
) -> Result[Option[T], ScenarioIssue]:
    if key not in data:
        return Ok(NULL)

    return check(data[key]).map(Some)


def check_labels(value: Any, count: int) -> Result[DynamicTuple[str], ScenarioIssue]:
    if not isinstance(value, list):
        return Err(ScenarioIssue(LABELS, EXPECTED_ARRAY))

    if len(value) != count:
        return Err(ScenarioIssue(LABELS, label_count(count)))

    seen = set()

    for index, item in enumerate(value):
        path = index_path(LABELS, index)

        if not isinstance(item, str):
            return Err(ScenarioIssue(path, EXPECTED_STRING))

        if item in seen:
            return Err(ScenarioIssue(path, DUPLICATE_LABEL))

        seen.add(item)

    return Ok(tuple(value))


def check_seed(value: Any) -> Result[int, ScenarioIssue]:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        return Err(ScenarioIssue(SEED, EXPECTED_SEED))

    return Ok(value)


def default_labels(count: int) -> DynamicTuple[str]:
    return tuple(str(index + 1) for index in range(count))


@frozen()
class Scenario(FromString[ScenarioIssue]):
    """A parsed scenario; costs and labels are kept in the input order."""

    costs: Costs = field()
    peg: float = field()
    decay: float = field()
    labels: DynamicTuple[str] = field()
    seed: int = field(default=DEFAULT_SEED)
    tolerance: Option[float] = field(default=NULL)

    @classmethod
    def from_string(cls, string: str) -> Result[Self, ScenarioIssue]:
        try:
            data = json.loads(string)

        except json.JSONDecodeError as error:
            return Err(ScenarioIssue(ROOT, error.msg, Some(error.lineno)))

        return cls.from_document(data)

    @classmethod
    def from_document(cls, data: Any) -> Result[Self, ScenarioIssue]:
        """Validates an already decoded JSON value."""
        if not isinstance(data, dict):
            return Err(ScenarioIssue(ROOT, EXPECTED_OBJECT))

        for key in data:
            if key not in KEYS:
                return Err(ScenarioIssue(key, UNKNOWN_KEY))

        for key in REQUIRED:
            if key not in data:
                return Err(ScenarioIssue(key, MISSING_KEY))

        costs_result = check_costs(data[COSTS])

        if costs_result.is_err():
            return Err(costs_result.unwrap_err())

        costs = costs_result.unwrap()

        peg_result = check_positive(PEG, data[PEG])

        if peg_result.is_err():
            return Err(peg_result.unwrap_err())

        decay_result = check_non_negative(DECAY, data[DECAY])

        if decay_result.is_err():
            return Err(decay_result.unwrap_err())

        count = len(costs)

        labels_result = check_optional(data, LABELS, lambda value: check_labels(value, count))

        if labels_result.is_err():
            return Err(labels_result.unwrap_err())

        seed_result = check_optional(data, SEED, check_seed)

        if seed_result.is_err():
            return Err(seed_result.unwrap_err())

        tolerance_result = check_optional(
            data, TOLERANCE, lambda value: check_positive(TOLERANCE, value)
        )

        if tolerance_result.is_err():
            return Err(tolerance_result.unwrap_err())

        return Ok(
            cls(
                costs,
                peg_result.unwrap(),
                decay_result.unwrap(),
                labels_result.unwrap().unwrap_or_else(lambda: default_labels(count)),
                seed_result.unwrap().unwrap_or(DEFAULT_SEED),
                tolerance_result.unwrap(),
            )
        )

    @classmethod
    def load(cls, path: Path) -> Self:
        """Reads and parses the scenario at `path`.

        Raises:
            OSError: The file can not be read.
            ParseError: The file does not hold a valid scenario.
        """
        return cls.parse(path.read_text(encoding="utf-8"))

    @property
    def count(self) -> int:
        return len(self.costs)

    def cost_profile(self) -> CostProfile:
        return CostProfile.from_costs(self.costs)

    def reward_params(self) -> RewardParams:
        return RewardParams(self.peg, self.decay)

    def with_seed(self, seed: int) -> Self:
        return evolve(self, seed=seed)

    def with_tolerance(self, tolerance: float) -> Self:
        return evolve(self, tolerance=Some(tolerance))

    def to_document(self) -> Document:
        """Echoes the scenario with every optional key filled in, except a missing `tol`."""
        document: Dict[str, Any] = {
            COSTS: list(self.costs),
            PEG: self.peg,
            DECAY: self.decay,
            LABELS: list(self.labels),
            SEED: self.seed,
        }

        if self.tolerance.is_some():
            document[TOLERANCE] = self.tolerance.unwrap()

        return document
