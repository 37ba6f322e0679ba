"""Tick-based job-shop plant simulator with pluggable scheduling policies."""

from .baseline import BaselinePolicy
from .engine import (
    Policy,
    SimState,
    SimulationAbort,
    audit_state,
    init_run,
    run_to_completion,
    tick,
)
from .flocking import DEFAULT_FLSQ_LEN, FlockingPolicy
from .metrics import (
    LotRecord,
    MetricsSummary,
    RunResult,
    finish_histogram,
    flow_factor,
    makespan,
    summarize,
    tardiness,
    utilization,
)
from .model import (
    Batch,
    ConfigError,
    Lot,
    Machine,
    MachineKind,
    MachineType,
    MultiQueue,
    Recipe,
    WorkcenterView,
    batch_missing,
    next_step,
    queue_total_len,
)
from .scenario import (
    LotSpec,
    Scenario,
    ScenarioError,
    build_small_fab,
    parse_scenario,
    serialize_scenario,
    small_fab_recipe,
)

__version__ = "0.1.0"

__all__ = [
    "BaselinePolicy",
    "Batch",
    "ConfigError",
    "DEFAULT_FLSQ_LEN",
    "FlockingPolicy",
    "Lot",
    "LotRecord",
    "LotSpec",
    "Machine",
    "MachineKind",
    "MachineType",
    "MetricsSummary",
    "MultiQueue",
    "Policy",
    "Recipe",
    "RunResult",
    "Scenario",
    "ScenarioError",
    "SimState",
    "SimulationAbort",
    "WorkcenterView",
    "audit_state",
    "batch_missing",
    "build_small_fab",
    "finish_histogram",
    "flow_factor",
    "init_run",
    "makespan",
    "next_step",
    "parse_scenario",
    "queue_total_len",
    "run_to_completion",
    "serialize_scenario",
    "small_fab_recipe",
    "summarize",
    "tardiness",
    "tick",
    "utilization",
]
