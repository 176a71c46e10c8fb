"""End-to-end solve pipeline with stage timings.

Stages: enumerate + dominance-filter rewarding sets, build the full
graph (accelerated by default, naive on request), score it, reduce it to
the score-optimal actions, select one tree. `resolve` re-runs the same
pipeline from a mid-mission state with a remaining budget.
"""
from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass
from fractions import Fraction

from .core import Scenario, State, remaining_budget, root_state, state_domain
from .errors import ScenarioError, SolveTimeoutError
from .graph import (
    DEFAULT_NODE_CAP,
    StateGraph,
    build_full_graph_accel,
    build_full_graph_naive,
    build_reduced_graph,
    compute_scores,
)
from .rewarding import RewardingSetBundle, enumerate_rewarding_sets, filter_dominated
from .tree import expected_reward, select_tree


@dataclass(frozen=True)
class SolveStats:
    """Per-solve instrumentation, one row of the benchmark tables."""

    n_actions: int
    budget: float
    score_root: float
    t_rewarding: float
    t_full: float
    t_reduced: float
    t_tree: float
    t_total: float
    n_full: int
    n_reduced: int
    n_tree: int
    n_rewarding_sets: int | None  # None for naive runs (stage skipped)


@dataclass(frozen=True)
class SolveResult:
    scenario: Scenario
    bundle: RewardingSetBundle | None
    full_graph: StateGraph
    reduced_graph: StateGraph
    tree: StateGraph
    score_normalized: Fraction
    score_raw: Fraction
    stats: SolveStats


class _Clock:
    def __init__(self, timeout: float | None):
        self.start = time.perf_counter()
        self.timeout = timeout

    def remaining(self) -> float | None:
        if self.timeout is None:
            return None
        left = self.timeout - (time.perf_counter() - self.start)
        if left <= 0:
            raise SolveTimeoutError(self.timeout)
        return left

    def elapsed(self) -> float:
        return time.perf_counter() - self.start


def solve(
    scn: Scenario,
    *,
    naive: bool = False,
    tie_break: str = "node-count",
    seed: int | None = None,
    root: State | None = None,
    queue_discipline: str = "lifo",
    node_cap: int = DEFAULT_NODE_CAP,
    timeout: float | None = None,
) -> SolveResult:
    clock = _Clock(timeout)
    root = root if root is not None else root_state(scn)

    t0 = time.perf_counter()
    bundle: RewardingSetBundle | None = None
    if not naive:
        bundle = filter_dominated(enumerate_rewarding_sets(scn, root), scn)
    t_rewarding = time.perf_counter() - t0

    t0 = time.perf_counter()
    if naive:
        full = build_full_graph_naive(
            scn, root, node_cap=node_cap, queue_discipline=queue_discipline,
            timeout=clock.remaining(),
        )
    else:
        full = build_full_graph_accel(
            scn, bundle, root, node_cap=node_cap, queue_discipline=queue_discipline,
            timeout=clock.remaining(),
        )
    t_full = time.perf_counter() - t0

    t0 = time.perf_counter()
    clock.remaining()
    compute_scores(full, scn)
    reduced = build_reduced_graph(full, scn)
    t_reduced = time.perf_counter() - t0

    t0 = time.perf_counter()
    clock.remaining()
    tree = select_tree(reduced, scn, tie_break=tie_break, seed=seed)
    score_norm, score_raw = expected_reward(tree, scn)
    t_tree = time.perf_counter() - t0

    stats = SolveStats(
        n_actions=scn.n_actions,
        budget=float(remaining_budget(scn, root)),
        score_root=full.root_node().score,
        t_rewarding=t_rewarding,
        t_full=t_full,
        t_reduced=t_reduced,
        t_tree=t_tree,
        t_total=clock.elapsed(),
        n_full=len(full),
        n_reduced=len(reduced),
        n_tree=len(tree),
        n_rewarding_sets=len(bundle) if bundle is not None else None,
    )
    return SolveResult(
        scenario=scn,
        bundle=bundle,
        full_graph=full,
        reduced_graph=reduced,
        tree=tree,
        score_normalized=score_norm,
        score_raw=score_raw,
        stats=stats,
    )


def with_budget(scn: Scenario, budget: Fraction) -> Scenario:
    return dataclasses.replace(scn, root_budget=budget)


def resolve(
    scn: Scenario,
    current_state: State,
    remaining: Fraction,
    **kwargs,
) -> SolveResult:
    """Solve onward from a mid-mission state with a remaining budget.

    The effective root budget is remaining + cost already spent, so the
    engine's state-derived budget arithmetic stays consistent.
    """
    dom = state_domain(scn)
    if not dom.contains(current_state):
        raise ScenarioError(
            f"current_state {list(current_state)} is not attainable", field="current_state"
        )
    if remaining < 0:
        raise ScenarioError("remaining budget is negative", field="remaining_budget")
    if remaining > scn.root_budget:
        raise ScenarioError(
            "remaining budget exceeds the scenario root budget", field="remaining_budget"
        )
    spent = scn.root_budget - remaining_budget(scn, current_state)
    effective = with_budget(scn, remaining + spent)
    return solve(effective, root=current_state, **kwargs)
