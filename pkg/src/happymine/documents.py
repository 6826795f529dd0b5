"""Result documents and their deterministic serialization.

Per-miner values in documents are always reported in the input order of the scenario and keyed
by the scenario labels. Every float is written with 17 significant digits, so documents
round-trip exactly through [`dump_json`][happymine.documents.dump_json] and
[`load_json`][happymine.documents.load_json].
"""

from __future__ import annotations

import csv
import json
from io import StringIO
from math import isfinite
from typing import Any, Iterable, Iterator, List, Sequence

from attrs import field, frozen
from named import get_type_name
from typing_extensions import Self
from wraps import NULL, Option, Result, Some

from happymine import __title__, __version__
from happymine.attacks import AttackReport, SybilReport
from happymine.errors import DomainError, NoEntry
from happymine.model import CostProfile
from happymine.revaluation import RevaluationReport
from happymine.solver import Equilibrium
from happymine.sweeps import SweepRow
from happymine.thresholds import Thresholds
from happymine.typing import Document
from happymine.verifier import DynamicsTrace, VerificationReport

__all__ = (
    # documents
    "ResultDocument",
    # serialization
    "dump_json",
    "load_json",
    "format_float",
    "sweep_header",
    "dump_sweep_csv",
    "dump_trace",
    # builders
    "thresholds_document",
    "equilibrium_document",
    "verification_document",
    "solve_body",
    "attack_document",
    "sybil_document",
    "revaluation_document",
    "entry_document",
    "dynamics_document",
)

FLOAT_FORMAT = ".17g"
FLOAT_MARKERS = frozenset(".eE")

INDENT = "  "

NON_FINITE = "expected finite value"
UNSUPPORTED_VALUE = "can not serialize values of type `{}`"
unsupported_value = UNSUPPORTED_VALUE.format
EXPECTED_OBJECT = "expected JSON object"

TOOL = "tool"
VERSION = "version"
COMMAND = "command"
SCENARIO = "scenario"
HEADER_KEYS = (TOOL, VERSION, COMMAND, SCENARIO)

SWEEP_COLUMNS = (
    "parameter",
    "value",
    "regime",
    "total_hashrate",
    "hashrate_ratio",
    "participants",
    "leader_share",
    "leader_relative_share",
)
MINER_COLUMNS = ("q", "lo", "hi")


def format_float(value: float) -> str:
    """Formats `value` with 17 significant digits, keeping it recognizable as a float.

    Raises:
        DomainError: `value` is not finite.
    """
    if not isfinite(value):
        raise DomainError("value", value, NON_FINITE)

    string = format(value, FLOAT_FORMAT)

    if FLOAT_MARKERS.isdisjoint(string):
        string += ".0"

    return string


def encode(value: Any, level: int, indent: bool) -> Iterator[str]:
    if value is None:
        yield "null"

    elif isinstance(value, bool):
        yield "true" if value else "false"

    elif isinstance(value, int):
        yield str(value)

    elif isinstance(value, float):
        yield format_float(value)

    elif isinstance(value, str):
        yield json.dumps(value)

    elif isinstance(value, dict):
        yield from encode_items(
            "{", "}", ((json.dumps(str(key)), item) for key, item in value.items()), level, indent
        )

    elif isinstance(value, (list, tuple)):
        yield from encode_items("[", "]", ((None, item) for item in value), level, indent)

    else:
        raise DomainError("value", value, unsupported_value(get_type_name(value)))


def encode_items(
    opening: str,
    closing: str,
    items: Iterable[Any],
    level: int,
    indent: bool,
) -> Iterator[str]:
    pairs = list(items)

    if not pairs:
        yield opening + closing
        return

    inner = INDENT * (level + 1) if indent else ""
    separator = ",\n" if indent else ", "

    yield opening

    if indent:
        yield "\n"

    for position, (key, item) in enumerate(pairs):
        if position:
            yield separator

        yield inner

        if key is not None:
            yield key
            yield ": "

        yield from encode(item, level + 1, indent)

    if indent:
        yield "\n"
        yield INDENT * level

    yield closing


def dump_json(document: Any, indent: bool = True) -> str:
    """Serializes `document` deterministically.

    Key order is preserved; floats are written with 17 significant digits.

    Raises:
        DomainError: The document holds non-finite floats or values that are not JSON.
    """
    return "".join(encode(document, 0, indent))


def load_json(string: str) -> Any:
    return json.loads(string)


@frozen()
class ResultDocument:
    """The output of one command."""

    command: str = field()
    body: Document = field()
    scenario: Option[Document] = field(default=NULL)
    version: str = field(default=__version__)

    def to_document(self) -> Document:
        document: Document = {TOOL: __title__, VERSION: self.version, COMMAND: self.command}

        if self.scenario.is_some():
            document[SCENARIO] = self.scenario.unwrap()

        document.update(self.body)

        return document

    @classmethod
    def from_document(cls, document: Any) -> Self:
        """Splits a loaded document back into its parts.

        Raises:
            DomainError: `document` is not an object.
        """
        if not isinstance(document, dict):
            raise DomainError("document", document, EXPECTED_OBJECT)

        scenario = document.get(SCENARIO)

        body = {key: value for key, value in document.items() if key not in HEADER_KEYS}

        return cls(
            command=document[COMMAND],
            body=body,
            scenario=NULL if scenario is None else Some(scenario),
            version=document[VERSION],
        )

    def dump(self) -> str:
        return dump_json(self.to_document()) + "\n"


def thresholds_document(thresholds: Thresholds) -> Document:
    star = thresholds.star

    dagger = thresholds.dagger

    return {
        "c_star": star.value,
        "n_star": star.count,
        "c_dagger": dagger.map_or(None, lambda threshold: threshold.value),
        "n_dagger": dagger.map_or(None, lambda threshold: threshold.count),
    }


def by_label(values: Sequence[Any], costs: CostProfile, labels: Sequence[str]) -> Document:
    return dict(zip(labels, costs.to_input_order(values)))


def equilibrium_document(
    equilibrium: Equilibrium, costs: CostProfile, labels: Sequence[str]
) -> Document:
    """Describes `equilibrium` in the input order, participants included."""
    count = costs.count

    intervals = equilibrium.intervals.map_or(
        None,
        lambda bounds: by_label(
            [[interval.low, interval.high] for interval in bounds], costs, labels
        ),
    )

    participants = set(equilibrium.participants)

    flags = [index in participants for index in range(count)]

    input_flags = costs.to_input_order(flags)

    return {
        "regime": equilibrium.regime.value,
        "total_hashrate": equilibrium.total_hashrate,
        "participants": [label for label, flag in zip(labels, input_flags) if flag],
        "hashrates": by_label(equilibrium.hashrates, costs, labels),
        "intervals": intervals,
        "selection": equilibrium.selection.map_or(None, lambda selection: selection.value),
    }


def verification_document(
    report: VerificationReport, costs: CostProfile, labels: Sequence[str]
) -> Document:
    miners = [
        {
            "hashrate": verdict.hashrate,
            "improvement": verdict.improvement,
            "left_derivative": verdict.left.map_or(None, float),
            "right_derivative": verdict.right.map_or(None, float),
            "passed": verdict.passed,
        }
        for verdict in report.verdicts
    ]

    return {
        "passed": report.passed,
        "epsilon": report.epsilon,
        "miners": by_label(miners, costs, labels),
    }


def solve_body(
    equilibrium: Equilibrium,
    costs: CostProfile,
    labels: Sequence[str],
    verification: Option[VerificationReport],
) -> Document:
    return {
        "thresholds": thresholds_document(equilibrium.thresholds),
        "regime": equilibrium.regime.value,
        "equilibrium": equilibrium_document(equilibrium, costs, labels),
        "utilities": by_label(equilibrium.utilities, costs, labels),
        "verification": verification.map_or(
            None, lambda report: verification_document(report, costs, labels)
        ),
    }


def attack_document(report: AttackReport) -> Document:
    return {
        "baseline_utility": report.baseline_utility,
        "attack_utility": report.attack_utility,
        "profitable": report.profitable,
        "regime_before": report.regime_before.value,
        "regime_after": report.regime_after.value,
    }


def sybil_document(report: SybilReport) -> Document:
    return {
        "identities": report.identities,
        "shift": attack_document(report.shift),
        "split_gain": report.split_gain,
    }


def revaluation_document(
    report: RevaluationReport, costs: CostProfile, labels: Sequence[str]
) -> Document:
    return {
        "factor": report.factor.value,
        "scaling": report.scaling.value,
        "hashrate_ratio": report.hashrate_ratio,
        "before": equilibrium_document(report.before, costs, labels),
        "after": equilibrium_document(report.after, costs, labels),
        "utilities": by_label(report.utilities, costs, labels),
    }


def entry_document(cost: float, decay: float, result: Result[float, NoEntry]) -> Document:
    return {
        "cost": cost,
        "delta": decay,
        "enters": result.is_ok(),
        "hashrate": result.ok().map_or(None, float),
    }


def dynamics_document(
    trace: DynamicsTrace, costs: CostProfile, labels: Sequence[str], order: str, seed: int
) -> Document:
    return {
        "order": order,
        "seed": seed,
        "converged": trace.converged,
        "iterations": trace.iterations,
        "final_gap": trace.final_gap,
        "hashrates": by_label(trace.final.hashrates, costs, labels),
    }


def dump_trace(trace: DynamicsTrace, costs: CostProfile) -> str:
    """Writes one JSON line per iterate, hashrates in the input order."""
    lines = [
        dump_json(
            {"iteration": iteration, "q": list(costs.to_input_order(profile.hashrates)), "gap": gap},
            indent=False,
        )
        for iteration, (profile, gap) in enumerate(zip(trace.iterates, trace.gaps))
    ]

    return "".join(line + "\n" for line in lines)


def sweep_header(labels: Sequence[str]) -> List[str]:
    header = list(SWEEP_COLUMNS)

    for label in labels:
        header.extend(f"{column}_{label}" for column in MINER_COLUMNS)

    return header


def optional_float(value: Option[float]) -> str:
    return value.map_or("", format_float)


def sweep_record(row: SweepRow, costs: CostProfile) -> List[str]:
    equilibrium = row.equilibrium

    count = costs.count

    hashrates = costs.to_input_order(equilibrium.hashrates)
    lows = costs.to_input_order([equilibrium.lower(index) for index in range(count)])
    highs = costs.to_input_order([equilibrium.upper(index) for index in range(count)])

    record = [
        row.parameter.value,
        format_float(row.value),
        row.regime.value,
        format_float(row.total_hashrate),
        format_float(row.hashrate_ratio),
        str(row.participant_count),
        format_float(row.leader_share),
        optional_float(row.leader_relative_share),
    ]

    for hashrate, low, high in zip(hashrates, lows, highs):
        record.extend((format_float(hashrate), format_float(low), format_float(high)))

    return record


def dump_sweep_csv(rows: Iterable[SweepRow], costs: CostProfile, labels: Sequence[str]) -> str:
    """Writes the sweep table with its fixed header, one record per row."""
    buffer = StringIO()

    writer = csv.writer(buffer, lineterminator="\n")

    writer.writerow(sweep_header(labels))

    for row in rows:
        writer.writerow(sweep_record(row, costs))

    return buffer.getvalue()
