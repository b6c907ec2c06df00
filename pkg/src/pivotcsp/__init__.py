"""Pivot consistency and root-set decomposition for binary CSPs with functional constraints."""

from .filtering import (
    ConsistencyWitness,
    FilterReport,
    arc_consistency,
    check_pivot_consistent,
    check_xk_compatible,
    compatible_call_bound,
    compatible,
    directional_path_consistency,
    path_consistency,
    pivot_filter,
    pivot_step,
)
from .generator import GeneratorParams, generate_instance
from .io import InstanceError, load_instance, load_plan, save_instance, save_plan, travel_agency
from .network import (
    FunctionalDirections,
    Network,
    NetworkError,
    NetworkStats,
    Relation,
    build_network,
    functional_directions,
    image,
    is_consistent,
    is_subproblem,
    network_stats,
    relation_view,
    supports,
    union_networks,
)
from .reports import run_compare, run_verify
from .solver import (
    BudgetExceeded,
    ExtensionError,
    SolveReport,
    brute_force_solve,
    count_solutions,
    extend_backtrack_free,
    instantiate_root,
    solve_decomposed,
)
from .structure import (
    PivotPlan,
    RootSet,
    StructureError,
    TieBreak,
    compute_pivot_plan,
    descendants,
    functional_subgraph,
    is_r_compatible,
    is_root_set,
    minimum_root_set,
    reduce,
    tarjan_scc,
)

__version__ = "0.1.0"

__all__ = [
    "arc_consistency",
    "brute_force_solve",
    "BudgetExceeded",
    "build_network",
    "check_pivot_consistent",
    "check_xk_compatible",
    "compatible",
    "compatible_call_bound",
    "compute_pivot_plan",
    "ConsistencyWitness",
    "count_solutions",
    "descendants",
    "directional_path_consistency",
    "extend_backtrack_free",
    "ExtensionError",
    "FilterReport",
    "functional_directions",
    "functional_subgraph",
    "FunctionalDirections",
    "generate_instance",
    "GeneratorParams",
    "image",
    "InstanceError",
    "instantiate_root",
    "is_consistent",
    "is_r_compatible",
    "is_root_set",
    "is_subproblem",
    "load_instance",
    "load_plan",
    "minimum_root_set",
    "Network",
    "network_stats",
    "NetworkError",
    "NetworkStats",
    "path_consistency",
    "pivot_filter",
    "pivot_step",
    "PivotPlan",
    "reduce",
    "Relation",
    "relation_view",
    "RootSet",
    "run_compare",
    "run_verify",
    "save_instance",
    "save_plan",
    "solve_decomposed",
    "SolveReport",
    "StructureError",
    "supports",
    "tarjan_scc",
    "TieBreak",
    "travel_agency",
    "union_networks",
]
