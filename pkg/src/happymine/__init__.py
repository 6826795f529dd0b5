"""Equilibria of hashrate-pegged mining rewards."""

from __future__ import annotations

__description__ = "Equilibria of hashrate-pegged mining rewards."

__title__ = "happymine"
__license__ = "MIT"
__version__ = "0.1.0"

from happymine.attacks import (
    AttackReport,
    CollusionScenario,
    SybilReport,
    collusion_report,
    identity_best_response,
    split_gain,
    sybil_report,
)
from happymine.axioms import AllocationAudit, allocations, audit_allocation
from happymine.config import (
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_SEED,
    DEFAULT_TOLERANCES,
    MONOPOLY_FRACTION,
    Tolerances,
)
from happymine.documents import (
    ResultDocument,
    attack_document,
    dump_json,
    dump_sweep_csv,
    dump_trace,
    dynamics_document,
    entry_document,
    equilibrium_document,
    format_float,
    load_json,
    revaluation_document,
    solve_body,
    sweep_header,
    sybil_document,
    thresholds_document,
    verification_document,
)
from happymine.entry import entry_curvature, entry_marginal, entry_utility, new_miner_optimum
from happymine.errors import (
    DomainError,
    HappyMineError,
    NoEntry,
    NoThreshold,
    UndefinedShare,
    UnsupportedError,
)
from happymine.model import (
    CostProfile,
    HashrateProfile,
    RevaluationFactor,
    RewardParams,
    Side,
    aggregate_x,
    allocation,
    branch_derivative,
    left_to_right_sum,
    payoff,
    reward,
    utility,
    utility_derivative,
)
from happymine.revaluation import RevaluationReport, Scaling, classify_scaling, revalue
from happymine.scenario import Scenario, ScenarioIssue
from happymine.solver import (
    Classification,
    Equilibrium,
    Interval,
    Regime,
    Selection,
    StaticEquilibrium,
    canonical_at_q_point,
    classify_regime,
    proportional_hashrates,
    solve_equilibrium,
    solve_static,
    utilitarian_at_q_point,
)
from happymine.sweeps import (
    MarketShare,
    Parameter,
    SweepRow,
    delta_sweep,
    market_shares,
    relative_market_share,
    sweep,
)
from happymine.thresholds import Threshold, Thresholds, find_thresholds, solve_threshold
from happymine.verifier import (
    BestResponseResult,
    Candidate,
    CandidateKind,
    DynamicsTrace,
    MinerVerdict,
    OracleResult,
    Order,
    VerificationReport,
    best_response,
    best_response_dynamics,
    grid_oracle,
    utility_gap,
    verify_equilibrium,
)

__all__ = (
    # model
    "RewardParams",
    "CostProfile",
    "HashrateProfile",
    "RevaluationFactor",
    "Side",
    "reward",
    "allocation",
    "utility",
    "utility_derivative",
    "aggregate_x",
    "payoff",
    "branch_derivative",
    "left_to_right_sum",
    # axioms
    "AllocationAudit",
    "audit_allocation",
    "allocations",
    # thresholds
    "Threshold",
    "Thresholds",
    "solve_threshold",
    "find_thresholds",
    # solver
    "Regime",
    "Selection",
    "Interval",
    "Equilibrium",
    "StaticEquilibrium",
    "Classification",
    "classify_regime",
    "solve_equilibrium",
    "solve_static",
    "canonical_at_q_point",
    "utilitarian_at_q_point",
    "proportional_hashrates",
    # verifier
    "CandidateKind",
    "Candidate",
    "BestResponseResult",
    "OracleResult",
    "MinerVerdict",
    "VerificationReport",
    "DynamicsTrace",
    "Order",
    "best_response",
    "grid_oracle",
    "verify_equilibrium",
    "best_response_dynamics",
    "utility_gap",
    # entry
    "new_miner_optimum",
    "entry_utility",
    "entry_marginal",
    "entry_curvature",
    # attacks
    "CollusionScenario",
    "AttackReport",
    "SybilReport",
    "collusion_report",
    "sybil_report",
    "split_gain",
    "identity_best_response",
    # revaluation
    "Scaling",
    "RevaluationReport",
    "revalue",
    "classify_scaling",
    # sweeps
    "Parameter",
    "MarketShare",
    "SweepRow",
    "sweep",
    "delta_sweep",
    "relative_market_share",
    "market_shares",
    # scenario
    "Scenario",
    "ScenarioIssue",
    # documents
    "ResultDocument",
    "dump_json",
    "load_json",
    "format_float",
    "sweep_header",
    "dump_sweep_csv",
    "dump_trace",
    "thresholds_document",
    "equilibrium_document",
    "verification_document",
    "solve_body",
    "attack_document",
    "sybil_document",
    "revaluation_document",
    "entry_document",
    "dynamics_document",
    # config
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "DEFAULT_SEED",
    "DEFAULT_MAX_ITERATIONS",
    "MONOPOLY_FRACTION",
    # errors
    "HappyMineError",
    "DomainError",
    "UnsupportedError",
    "NoThreshold",
    "NoEntry",
    "UndefinedShare",
)
