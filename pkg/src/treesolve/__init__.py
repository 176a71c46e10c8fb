"""Globally optimal decision trees for budgeted stochastic missions.

Actions have probabilistic outcomes and AND/OR prerequisite gates plus
NOTAND/NOTOR preclusions over other actions' outcomes. The solver
enumerates minimal rewarding sets, builds a pruned state graph, scores
it by dynamic programming (cross-validated by a linear program), and
extracts a smallest optimal decision tree.
"""
from .core import (
    ActionSpec,
    OutcomeSpec,
    PrereqExpr,
    Scenario,
    State,
    StateDomain,
    apply_outcome,
    available_actions,
    outcome_delta,
    remaining_budget,
    reward,
    reward_raw,
    root_state,
    state_domain,
    state_index,
    state_key,
)
from .errors import (
    CapacityError,
    InternalCheckError,
    OutOfDomainError,
    ScenarioError,
    SolveTimeoutError,
    TreesolveError,
)
from .export import export_tree
from .generator import GeneratorParams, generate_instance
from .graph import (
    StateGraph,
    build_full_graph_accel,
    build_full_graph_naive,
    build_reduced_graph,
    compute_scores,
)
from .lpcheck import build_score_lp, check_against_dp, solve_score_lp, tight_actions
from .pipeline import SolveResult, SolveStats, resolve, solve
from .rewarding import (
    RewardingSet,
    RewardingSetBundle,
    enumerate_rewarding_sets,
    filter_dominated,
    propagate,
    prune_actions,
)
from .scenario_io import (
    builtin_scenario,
    load_scenario,
    parse_scenario,
    scenario_from_document,
    scenario_to_document,
    serialize_scenario,
)
from .tree import expected_reward, random_tie_break, select_tree, subtree_size

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
