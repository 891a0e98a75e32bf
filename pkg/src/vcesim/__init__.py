"""Online virtual cluster embedding (VCE) simulation suite.

Builds capacitated datacenter substrates (fat-tree, BCube, MDCube), generates
seeded online request sequences under several benefit patterns, embeds virtual
clusters through a min-cost-flow oracle, and runs four online admission
algorithms (greedy, COVCE, COVCEload, GVOP) with competitive-ratio invariant
checks and a CSV metrics pipeline.
"""

from vcesim.substrate import (
    NodeKind,
    SubstrateEdge,
    SubstrateGraph,
    SubstrateNode,
    build_bcube,
    build_custom,
    build_fat_tree,
    build_mdcube,
)
from vcesim.workload import (
    EmpiricalCostTable,
    PeakBenefit,
    RandomBenefit,
    ReqSizeBenefit,
    VCRequest,
    VceSizeBenefit,
    WaveBenefit,
    build_empirical_cost_table,
    generate_sequence,
)
from vcesim.oracle import (
    CapacityView,
    CostVector,
    Embedding,
    find_min_cost_embedding,
    solve_flow_for_target,
)
from vcesim.algorithms import (
    ALGORITHMS,
    Decision,
    PrimalDualState,
    RunResult,
    check_step_ratio,
    covce_cost,
    run_sequence,
)
from vcesim.metrics import MetricsSeries, acceptance_ratio_windows, avg_violation, violation
from vcesim.offline import enumerate_min_cost_embedding, optimal_offline_profit
from vcesim.runner import ExperimentConfig, run_experiment

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "CapacityView",
    "CostVector",
    "Decision",
    "Embedding",
    "EmpiricalCostTable",
    "ExperimentConfig",
    "MetricsSeries",
    "NodeKind",
    "PeakBenefit",
    "PrimalDualState",
    "RandomBenefit",
    "ReqSizeBenefit",
    "RunResult",
    "SubstrateEdge",
    "SubstrateGraph",
    "SubstrateNode",
    "VCRequest",
    "VceSizeBenefit",
    "WaveBenefit",
    "acceptance_ratio_windows",
    "avg_violation",
    "build_bcube",
    "build_custom",
    "build_empirical_cost_table",
    "build_fat_tree",
    "build_mdcube",
    "check_step_ratio",
    "covce_cost",
    "enumerate_min_cost_embedding",
    "find_min_cost_embedding",
    "generate_sequence",
    "optimal_offline_profit",
    "run_experiment",
    "run_sequence",
    "solve_flow_for_target",
    "violation",
]
