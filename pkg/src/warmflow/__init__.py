"""Max-flow/min-cut with warm-startable Push-Relabel.

The engine runs highest-label Push-Relabel with gap and global relabeling;
the pipeline accepts an arbitrary predicted pseudo-flow (infeasible and
non-cut-saturating allowed) and solves in time governed by the prediction
error rather than the graph size.
"""

from .engine import (
    BoundedOutcome,
    HeightLabels,
    InvariantError,
    SolverStats,
    bounded_maxflow,
    bounded_maxflow_doubling,
    define_heights,
    gap_warm_push_relabel,
    global_relabel,
    heights_valid,
    induced_cut_from_heights,
    init_cold_preflow,
    solve_maxflow,
    vanilla_push_relabel,
)
from .kernels import IMPLEMENTATION as KERNEL_IMPLEMENTATION
from .network import (
    CutPartition,
    FlowAccounting,
    InducedResidual,
    Network,
    PseudoFlow,
    build_network,
    cap_prediction,
    flow_accounting,
    flow_value,
    induced_residual_subgraph,
    is_saturated_cut,
    residual_reachability_cut,
    reverse_network,
)
from .oracle import OracleResult, brute_force_mincut, reference_maxflow
from .pipeline import (
    PipelinePhaseReport,
    Solution,
    WarmStartOptions,
    move_deficit_to_t_side,
    move_excess_to_s_side,
    restore_flow,
    saturate_cut,
    saturate_predicted_cut,
    warm_start_solve,
)
from .prediction import (
    PredictionErrorReport,
    l1_distance,
    perturb_flow,
    prediction_error,
)

__version__ = "0.1.0"

__all__ = [
    "BoundedOutcome",
    "CutPartition",
    "FlowAccounting",
    "HeightLabels",
    "InducedResidual",
    "InvariantError",
    "KERNEL_IMPLEMENTATION",
    "Network",
    "OracleResult",
    "PipelinePhaseReport",
    "PredictionErrorReport",
    "PseudoFlow",
    "Solution",
    "SolverStats",
    "WarmStartOptions",
    "bounded_maxflow",
    "bounded_maxflow_doubling",
    "brute_force_mincut",
    "build_network",
    "cap_prediction",
    "define_heights",
    "flow_accounting",
    "flow_value",
    "gap_warm_push_relabel",
    "global_relabel",
    "heights_valid",
    "induced_cut_from_heights",
    "induced_residual_subgraph",
    "init_cold_preflow",
    "is_saturated_cut",
    "l1_distance",
    "move_deficit_to_t_side",
    "move_excess_to_s_side",
    "perturb_flow",
    "prediction_error",
    "reference_maxflow",
    "residual_reachability_cut",
    "restore_flow",
    "reverse_network",
    "saturate_cut",
    "saturate_predicted_cut",
    "solve_maxflow",
    "vanilla_push_relabel",
    "warm_start_solve",
]
