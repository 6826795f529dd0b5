"""The `happymine` command-line interface.

Documents go to standard output (or to `--out`), diagnostics and logs go to standard error.

Exit codes:

| code | meaning                                                                    |
|------|----------------------------------------------------------------------------|
| `0`  | success, including non-convergent dynamics                                 |
| `2`  | input error: unreadable or malformed scenario, invalid flags               |
| `3`  | negative verdict: failed verification, profitable attack, or no entry      |
"""

from __future__ import annotations

import logging
import sys
from argparse import ArgumentParser, Namespace
from enum import IntEnum
from math import isfinite
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from wraps import NULL, Option, ParseError, Some

from happymine.attacks import CollusionScenario, collusion_report, sybil_report
from happymine.config import DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCES, Tolerances
from happymine.documents import (
    ResultDocument,
    attack_document,
    dump_sweep_csv,
    dump_trace,
    dynamics_document,
    entry_document,
    revaluation_document,
    solve_body,
    sybil_document,
    verification_document,
)
from happymine.entry import new_miner_optimum
from happymine.errors import HappyMineError
from happymine.model import HashrateProfile, RevaluationFactor, RewardParams
from happymine.revaluation import revalue
from happymine.scenario import Scenario
from happymine.solver import Selection, solve_equilibrium
from happymine.sweeps import Parameter, sweep
from happymine.verifier import (
    Order,
    VerificationReport,
    best_response_dynamics,
    verify_equilibrium,
)

__all__ = ("ExitCode", "main", "build_parser")

logger = logging.getLogger(__name__)

NAME = "happymine"
DESCRIPTION = "Equilibria of hashrate-pegged mining rewards."

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

MIN_STEPS = 2
PROFILE_SEPARATOR = ","

EXPECTED_RANGE = "expected `--from` to be less than `--to`"
EXPECTED_STEPS = "expected at least {} steps"
expected_steps = EXPECTED_STEPS.format
EXPECTED_PROFILE = "expected {} comma-separated hashrates"
expected_profile = EXPECTED_PROFILE.format
CAN_NOT_READ = "can not read `{}`: {}"
can_not_read = CAN_NOT_READ.format
CAN_NOT_WRITE = "can not write `{}`: {}"
can_not_write = CAN_NOT_WRITE.format
INPUT_ERROR = "error: {}"
input_error = INPUT_ERROR.format
EXPECTED_HASHRATE = "expected positive `--hashrate`"
EXPECTED_SEED = "expected non-negative `--seed`"
EXPECTED_TOLERANCE = "expected finite positive `--tol`"


class ExitCode(IntEnum):
    SUCCESS = 0
    INPUT_ERROR = 2
    NEGATIVE = 3


class InputError(HappyMineError):
    """Invalid command-line input detected after parsing the flags."""


def verdict(negative: bool) -> ExitCode:
    return ExitCode.NEGATIVE if negative else ExitCode.SUCCESS


def write(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")

    except OSError as error:
        raise InputError(can_not_write(path, error.strerror)) from None


def emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)

    else:
        write(out, text)


def load_scenario(arguments: Namespace) -> Scenario:
    path: Path = arguments.scenario

    try:
        scenario = Scenario.load(path)

    except OSError as error:
        raise InputError(can_not_read(path, error.strerror)) from None

    if arguments.seed is not None:
        if arguments.seed < 0:
            raise InputError(EXPECTED_SEED)

        scenario = scenario.with_seed(arguments.seed)

    if arguments.tol is not None:
        if not (isfinite(arguments.tol) and arguments.tol > 0.0):
            raise InputError(EXPECTED_TOLERANCE)

        scenario = scenario.with_tolerance(arguments.tol)

    return scenario


def tolerances_of(scenario: Scenario) -> Tolerances:
    return scenario.tolerance.map_or(DEFAULT_TOLERANCES, DEFAULT_TOLERANCES.with_epsilon)


def solve_command(arguments: Namespace) -> ExitCode:
    scenario = load_scenario(arguments)

    costs = scenario.cost_profile()
    params = scenario.reward_params()
    tolerances = tolerances_of(scenario)

    equilibrium = solve_equilibrium(costs, params, arguments.selection, tolerances)

    verification: Option[VerificationReport]

    if arguments.no_verify:
        verification = NULL

    else:
        verification = Some(verify_equilibrium(equilibrium, costs, params, tolerances=tolerances))

    document = ResultDocument(
        "solve",
        solve_body(equilibrium, costs, scenario.labels, verification),
        Some(scenario.to_document()),
    )

    emit(document.dump(), arguments.out)

    return verdict(verification.is_some_and(lambda report: not report.passed))


def sweep_command(arguments: Namespace) -> ExitCode:
    scenario = load_scenario(arguments)

    start = arguments.start
    stop = arguments.stop
    steps = arguments.steps

    if not start < stop:
        raise InputError(EXPECTED_RANGE)

    if steps < MIN_STEPS:
        raise InputError(expected_steps(MIN_STEPS))

    values = [float(value) for value in np.linspace(start, stop, steps)]

    costs = scenario.cost_profile()

    rows = sweep(
        costs,
        scenario.reward_params(),
        Parameter(arguments.param),
        values,
        arguments.selection,
        tolerances_of(scenario),
    )

    emit(dump_sweep_csv(rows, costs, scenario.labels), arguments.out)

    return ExitCode.SUCCESS


def parse_profile(string: str, count: int) -> Sequence[float]:
    try:
        values = [float(part) for part in string.split(PROFILE_SEPARATOR)]

    except ValueError:
        raise InputError(expected_profile(count)) from None

    if len(values) != count:
        raise InputError(expected_profile(count))

    return values


def verify_command(arguments: Namespace) -> ExitCode:
    scenario = load_scenario(arguments)

    costs = scenario.cost_profile()
    params = scenario.reward_params()
    tolerances = tolerances_of(scenario)

    if arguments.profile is None:
        profile = solve_equilibrium(costs, params, arguments.selection, tolerances).profile

    else:
        values = parse_profile(arguments.profile, costs.count)

        profile = HashrateProfile.from_iterable(costs.from_input_order(values))

    report = verify_equilibrium(profile, costs, params, tolerances=tolerances)

    document = ResultDocument(
        "verify",
        {"verification": verification_document(report, costs, scenario.labels)},
        Some(scenario.to_document()),
    )

    emit(document.dump(), arguments.out)

    return verdict(not report.passed)


def dynamics_command(arguments: Namespace) -> ExitCode:
    scenario = load_scenario(arguments)

    costs = scenario.cost_profile()
    params = scenario.reward_params()
    tolerances = tolerances_of(scenario)

    order = Order(arguments.order)

    if arguments.start_at_equilibrium:
        initial = solve_equilibrium(costs, params, arguments.selection, tolerances).profile

    else:
        initial = HashrateProfile.zeros(costs.count)

    trace = best_response_dynamics(
        initial,
        costs,
        params,
        order=order,
        seed=scenario.seed,
        max_iterations=arguments.max_iterations,
        tolerance=arguments.gap,
        tolerances=tolerances,
    )

    if not trace.converged:
        logger.warning("dynamics did not converge in %d sweeps", trace.iterations)

    if arguments.trace is not None:
        write(arguments.trace, dump_trace(trace, costs))

    document = ResultDocument(
        "dynamics",
        dynamics_document(trace, costs, scenario.labels, order.value, scenario.seed),
        Some(scenario.to_document()),
    )

    emit(document.dump(), arguments.out)

    return ExitCode.SUCCESS


def reward_params_of(arguments: Namespace) -> RewardParams:
    return RewardParams(arguments.peg, arguments.delta)


def collude_command(arguments: Namespace) -> ExitCode:
    scenario = CollusionScenario(arguments.m, arguments.c, arguments.k, reward_params_of(arguments))

    report = collusion_report(scenario)

    body = {"miners": scenario.count, "cost": scenario.cost, "colluders": scenario.colluders}
    body.update(attack_document(report))

    emit(ResultDocument("collude", body).dump(), arguments.out)

    return verdict(report.profitable)


def sybil_command(arguments: Namespace) -> ExitCode:
    report = sybil_report(arguments.m, arguments.c, arguments.k, reward_params_of(arguments))

    body = {"miners": arguments.m, "cost": arguments.c}
    body.update(sybil_document(report))

    emit(ResultDocument("sybil", body).dump(), arguments.out)

    return verdict(report.shift.profitable)


def revalue_command(arguments: Namespace) -> ExitCode:
    scenario = load_scenario(arguments)

    costs = scenario.cost_profile()

    report = revalue(
        costs,
        scenario.reward_params(),
        RevaluationFactor(arguments.factor),
        arguments.selection,
        tolerances_of(scenario),
    )

    document = ResultDocument(
        "revalue",
        revaluation_document(report, costs, scenario.labels),
        Some(scenario.to_document()),
    )

    emit(document.dump(), arguments.out)

    return ExitCode.SUCCESS


def new_miner_command(arguments: Namespace) -> ExitCode:
    # incumbents holding `H = Q` map to the normalized game by measuring hashrate in units of `H`
    incumbents = arguments.hashrate

    if not incumbents > 0.0:
        raise InputError(EXPECTED_HASHRATE)

    normalized = arguments.cost * incumbents

    result = new_miner_optimum(normalized, arguments.delta).map(
        lambda hashrate: hashrate * incumbents
    )

    body = entry_document(arguments.cost, arguments.delta, result)
    body["incumbent_hashrate"] = incumbents
    body["normalized_cost"] = normalized

    emit(ResultDocument("new-miner", body).dump(), arguments.out)

    return verdict(result.is_err())


Handler = Callable[[Namespace], ExitCode]


def add_common(parser: ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, default=None, help="write the output to this file")
    parser.add_argument("--verbose", action="store_true", help="log debug messages to stderr")


def add_scenario(parser: ArgumentParser) -> None:
    parser.add_argument("scenario", type=Path, help="path to the JSON scenario")
    parser.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    parser.add_argument(
        "--tol", type=float, default=None, help="override the verification epsilon"
    )
    parser.add_argument(
        "--selection",
        type=Selection,
        choices=list(Selection),
        default=Selection.CANONICAL,
        metavar="{canonical,utilitarian}",
        help="the equilibrium picked when the total hashrate is pegged",
    )


def add_homogeneous(parser: ArgumentParser) -> None:
    parser.add_argument("--m", type=int, required=True, help="the number of miners")
    parser.add_argument("--c", type=float, required=True, help="the common unit cost")
    parser.add_argument("--k", type=int, required=True, help="the colluders or identities")
    parser.add_argument("--Q", dest="peg", type=float, default=1.0, help="the peg")
    parser.add_argument("--delta", type=float, default=1.0, help="the decay exponent")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog=NAME, description=DESCRIPTION)

    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Handler, help: str) -> ArgumentParser:
        subparser = commands.add_parser(name, help=help)
        subparser.set_defaults(handler=handler)

        add_common(subparser)

        return subparser

    solve = command("solve", solve_command, "solve and verify the equilibrium")
    add_scenario(solve)
    solve.add_argument("--no-verify", action="store_true", help="skip the verification")

    sweep_parser = command("sweep", sweep_command, "sweep one parameter into a CSV table")
    add_scenario(sweep_parser)
    sweep_parser.add_argument(
        "--param", choices=[parameter.value for parameter in Parameter], required=True
    )
    sweep_parser.add_argument("--from", dest="start", type=float, required=True)
    sweep_parser.add_argument("--to", dest="stop", type=float, required=True)
    sweep_parser.add_argument("--steps", type=int, required=True)

    verify = command("verify", verify_command, "verify a hashrate profile")
    add_scenario(verify)
    verify.add_argument(
        "--profile", default=None, help="comma-separated hashrates in the scenario order"
    )

    dynamics = command("dynamics", dynamics_command, "run best-response dynamics")
    add_scenario(dynamics)
    dynamics.add_argument(
        "--order", choices=[order.value for order in Order], default=Order.ROUND_ROBIN.value
    )
    dynamics.add_argument("--max-iterations", type=int, default=DEFAULT_MAX_ITERATIONS)
    dynamics.add_argument("--gap", type=float, default=1e-12, help="the convergence tolerance")
    dynamics.add_argument(
        "--start-at-equilibrium",
        action="store_true",
        help="start from the solved equilibrium instead of zero",
    )
    dynamics.add_argument("--trace", type=Path, default=None, help="write iterates as JSON lines")

    collude = command("collude", collude_command, "analyze collusion of homogeneous miners")
    add_homogeneous(collude)

    sybil = command("sybil", sybil_command, "analyze a Sybil attack of homogeneous miners")
    add_homogeneous(sybil)

    revalue_parser = command("revalue", revalue_command, "revalue the currency")
    add_scenario(revalue_parser)
    revalue_parser.add_argument("--R", dest="factor", type=float, required=True)

    new_miner = command("new-miner", new_miner_command, "compute the optimal entrant purchase")
    new_miner.add_argument("--cost", type=float, required=True)
    new_miner.add_argument("--delta", type=float, required=True)
    new_miner.add_argument(
        "--hashrate", type=float, default=1.0, help="the incumbent hashrate, also the peg"
    )

    return parser


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Runs the command line with `argv` (defaults to `sys.argv[1:]`) and returns the exit code."""
    parser = build_parser()

    try:
        arguments = parser.parse_args(argv)

    except SystemExit as error:
        return ExitCode.SUCCESS if not error.code else ExitCode.INPUT_ERROR

    configure_logging(arguments.verbose)

    handler: Handler = arguments.handler

    try:
        code = handler(arguments)

    except ParseError as error:
        print(input_error(error.error), file=sys.stderr)

        return ExitCode.INPUT_ERROR

    except HappyMineError as error:
        print(input_error(error), file=sys.stderr)

        return ExitCode.INPUT_ERROR

    logger.debug("%s finished with %s", arguments.command, code.name)

    return int(code)
