"""Schedulability analysis, simulation and experiment tooling for
mixed-criticality task systems with per-component tolerance limits."""

from .model import (
    HC,
    LC,
    Component,
    CriticalityLevel,
    MCTask,
    SpecValidationError,
    SystemSpec,
    UtilizationSummary,
    load_spec,
    loads_spec,
    dumps_spec,
    save_spec,
    utilization,
    validate_system,
    with_tolerance_limits,
)
from .demand import (
    DemandSplit,
    ModeSwitchInstants,
    dbf_carryover_job,
    dbf_component,
    dbf_component_optimized,
    dbf_dropped_job,
    dbf_task,
    dbf_task_split,
)
from .supply import DELTA, MCPRInterface, sbf, sbf_lc, sbf_pattern_a, sbf_pattern_b
from .analysis import (
    FlatVerdict,
    FlatWitness,
    HierarchicalResult,
    InfeasibleTightening,
    InterfaceResult,
    ToleranceResult,
    flat_test,
    generate_interface,
    hierarchical_test,
    max_schedulable_tl,
    max_tolerance,
    t_max,
    tighten_deadlines,
)
from .simulator import SimConfig, SimReport, compare_mechanisms, simulate
from .taskgen import GenConfig, GenerationError, generate

__version__ = "0.1.0"
