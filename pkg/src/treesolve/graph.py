"""State graph construction and scoring.

Builds the full graph either naively (closure under all available
actions) or accelerated (closure under reward-pruned actions, with
rewarding-set bundles propagated along edges and dropped once a node is
expanded). Scores are computed by the memoized expectation recursion and
the reduced graph keeps only score-optimal actions.

Graphs key nodes by the canonical byte encoding of the state vector.
Edges always turn a zero entry nonzero, so every edge strictly grows the
set of taken actions; that ordering doubles as the topological order for
scoring.
"""
from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .core import Scenario, State, TOL, root_state, state_key
from .errors import CapacityError, InternalCheckError, SolveTimeoutError
from .rewarding import RewardingSetBundle, propagate, prune_actions

DEFAULT_NODE_CAP = 50_000_000

# Children map one action id to its outcome edges: ((outcome_id, child key), ...).
ChildMap = dict[str, tuple[tuple[int, bytes], ...]]


@dataclass
class NodeRecord:
    state: State
    pruned_actions: tuple[str, ...]
    children: ChildMap = field(default_factory=dict)
    score: float | None = None
    best_actions: tuple[str, ...] | None = None
    reach_probability: Fraction | None = None


@dataclass
class StateGraph:
    kind: str  # full | reduced | tree
    root: bytes
    nodes: dict[bytes, NodeRecord]

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, key: bytes) -> NodeRecord:
        return self.nodes[key]

    def root_node(self) -> NodeRecord:
        return self.nodes[self.root]

    def leaf_keys(self) -> list[bytes]:
        return [k for k, rec in self.nodes.items() if not rec.children]


class _Tables:
    """Per-scenario lookup tables for the hot construction loops."""

    def __init__(self, scn: Scenario):
        n = scn.n_actions
        self.ids = [a.id for a in scn.actions]
        self.cost = [a.cost for a in scn.actions]
        self.scale = lcm(*(a.cost.denominator for a in scn.actions), scn.root_budget.denominator)
        self.cost_int = [int(a.cost * self.scale) for a in scn.actions]
        self.budget_int = int(scn.root_budget * self.scale)
        self.outcomes = [
            [(o.outcome_id, float(o.probability), o.probability) for o in a.outcomes]
            for a in scn.actions
        ]
        self.prob_float = [
            {o.outcome_id: float(o.probability) for o in a.outcomes} for a in scn.actions
        ]
        self.prob_frac = [
            {o.outcome_id: o.probability for o in a.outcomes} for a in scn.actions
        ]
        self.repeatable = [a.repeatable for a in scn.actions]
        self.reward_rows = [
            (scn.index[aid], oid, value / scn.reward_scale)
            for (aid, oid), value in scn.reward_pairs
        ]
        idx = scn.index

        def pairs(group):
            return tuple((idx[a], j) for a, j in sorted(group))

        self.gates = [
            (
                pairs(a.prereq.and_set),
                pairs(a.prereq.or_set),
                pairs(a.prereq.notand_set),
                pairs(a.prereq.notor_set),
            )
            for a in scn.actions
        ]
        self.n = n

    def reward_norm(self, s: State) -> Fraction:
        best = Fraction(0)
        for i, oid, value in self.reward_rows:
            if s[i] == oid and value > best:
                best = value
        return best

    def available(self, s: State, budget_int: int) -> list[int]:
        out = []
        for i in range(self.n):
            if s[i] != 0 or self.cost_int[i] > budget_int:
                continue
            and_p, or_p, notand_p, notor_p = self.gates[i]
            if any(s[a] != j for a, j in and_p):
                continue
            if or_p and all(s[a] != j for a, j in or_p):
                continue
            if any(s[a] == j for a, j in notand_p):
                continue
            if notor_p and all(s[a] == j for a, j in notor_p):
                continue
            out.append(i)
        return out


def _tables(scn: Scenario) -> _Tables:
    try:
        return scn._tables  # type: ignore[attr-defined]
    except AttributeError:
        t = _Tables(scn)
        object.__setattr__(scn, "_tables", t)
        return t


class _Deadline:
    def __init__(self, seconds: float | None):
        self.seconds = seconds
        self.at = None if seconds is None else time.monotonic() + seconds

    def check(self) -> None:
        if self.at is not None and time.monotonic() > self.at:
            raise SolveTimeoutError(self.seconds)


def build_full_graph_naive(
    scn: Scenario,
    root: State | None = None,
    *,
    node_cap: int = DEFAULT_NODE_CAP,
    queue_discipline: str = "lifo",
    timeout: float | None = None,
) -> StateGraph:
    """Closure of the root under every available action, no pruning."""
    return _build(scn, None, root, node_cap, queue_discipline, timeout)


def build_full_graph_accel(
    scn: Scenario,
    bundle: RewardingSetBundle,
    root: State | None = None,
    *,
    node_cap: int = DEFAULT_NODE_CAP,
    queue_discipline: str = "lifo",
    timeout: float | None = None,
) -> StateGraph:
    """Closure under reward-pruned actions, with bundle propagation."""
    return _build(scn, bundle, root, node_cap, queue_discipline, timeout)


def _build(
    scn: Scenario,
    bundle: RewardingSetBundle | None,
    root: State | None,
    node_cap: int,
    queue_discipline: str,
    timeout: float | None,
) -> StateGraph:
    if queue_discipline not in ("lifo", "fifo"):
        raise ValueError(f"unknown queue discipline {queue_discipline!r}")
    t = _tables(scn)
    deadline = _Deadline(timeout)
    accelerated = bundle is not None

    root = root if root is not None else root_state(scn)
    root_key = state_key(root)
    spent = sum(t.cost_int[i] for i, x in enumerate(root) if x != 0)
    root_budget_int = t.budget_int - spent

    budgets: dict[bytes, int] = {root_key: root_budget_int}
    bundles: dict[bytes, RewardingSetBundle] = {}

    def pruned_at(s: State, key: bytes, b: RewardingSetBundle | None) -> tuple[str, ...]:
        avail = [t.ids[i] for i in t.available(s, budgets[key])]
        if not accelerated:
            return tuple(avail)
        return tuple(prune_actions(avail, b, t.reward_norm(s)))

    nodes: dict[bytes, NodeRecord] = {}
    if accelerated:
        bundles[root_key] = bundle
    nodes[root_key] = NodeRecord(root, pruned_at(root, root_key, bundle))
    queue: deque[bytes] = deque([root_key])
    pops = 0

    while queue:
        key = queue.pop() if queue_discipline == "lifo" else queue.popleft()
        pops += 1
        if pops % 1024 == 0:
            deadline.check()
        rec = nodes[key]
        s = rec.state
        parent_budget = budgets[key]
        parent_bundle = bundles.pop(key, None)
        for aid in rec.pruned_actions:
            i = scn.index[aid]
            child_budget = parent_budget - t.cost_int[i]
            edges = []
            for oid, _, p_frac in t.outcomes[i]:
                child = s[:i] + (oid,) + s[i + 1 :]
                ckey = state_key(child)
                edges.append((oid, ckey))
                if ckey in nodes:
                    continue
                if len(nodes) >= node_cap:
                    raise CapacityError(node_cap)
                budgets[ckey] = child_budget
                child_bundle = None
                if accelerated:
                    child_bundle = propagate(
                        parent_bundle,
                        (aid, oid),
                        child,
                        scn,
                        child_budget=Fraction(child_budget, t.scale),
                    )
                    bundles[ckey] = child_bundle
                nodes[ckey] = NodeRecord(child, pruned_at(child, ckey, child_bundle))
                queue.append(ckey)
            rec.children[aid] = tuple(edges)
    return StateGraph(kind="full", root=root_key, nodes=nodes)


def _taken_count(key: bytes) -> int:
    return sum(1 for b in key if b)


def topological_keys(g: StateGraph) -> list[bytes]:
    """Parents before children; valid because edges only add taken actions."""
    return sorted(g.nodes, key=_taken_count)


def compute_scores(g: StateGraph, scn: Scenario) -> int:
    """Fill every node's score; returns the number of evaluations.

    Leaves (no pruned actions) score their own normalized reward; interior
    nodes score the best single-action expectation over their children.
    Each node is evaluated exactly once, children first.
    """
    t = _tables(scn)
    order = topological_keys(g)
    evaluations = 0
    for key in reversed(order):
        rec = g.nodes[key]
        if not rec.pruned_actions:
            rec.score = float(t.reward_norm(rec.state))
        else:
            best = -1.0
            for aid in rec.pruned_actions:
                probs = t.prob_float[scn.index[aid]]
                total = 0.0
                for oid, ckey in rec.children[aid]:
                    child_score = g.nodes[ckey].score
                    if child_score is None:
                        raise InternalCheckError("score recursion hit an unscored child")
                    total += probs[oid] * child_score
                if total > best:
                    best = total
            if best > 1.0 + TOL or best < -TOL:
                raise InternalCheckError(f"score {best} outside [0, 1]")
            rec.score = min(1.0, max(0.0, best))
        evaluations += 1
    if evaluations != len(g.nodes):
        raise InternalCheckError("score pass did not touch every node exactly once")
    return evaluations


def action_expectation(g: StateGraph, rec: NodeRecord, scn: Scenario, aid: str) -> float:
    """Expected score of taking one action at a node of a scored graph."""
    probs = _tables(scn).prob_float[scn.index[aid]]
    return sum(probs[oid] * g.nodes[ckey].score for oid, ckey in rec.children[aid])


def best_actions_at(g: StateGraph, key: bytes, scn: Scenario) -> tuple[str, ...]:
    """Actions whose expectation ties the node score within tolerance."""
    rec = g.nodes[key]
    if not rec.pruned_actions:
        return ()
    return tuple(
        aid
        for aid in rec.pruned_actions
        if action_expectation(g, rec, scn, aid) >= rec.score - TOL
    )


def build_reduced_graph(g: StateGraph, scn: Scenario) -> StateGraph:
    """Subgraph reachable from the root through score-optimal actions only."""
    if g.root_node().score is None:
        raise InternalCheckError("reduce requires a scored graph")
    nodes: dict[bytes, NodeRecord] = {}
    queue = [g.root]
    while queue:
        key = queue.pop()
        if key in nodes:
            continue
        src = g.nodes[key]
        best = best_actions_at(g, key, scn)
        nodes[key] = NodeRecord(
            state=src.state,
            pruned_actions=src.pruned_actions,
            children={aid: src.children[aid] for aid in best},
            score=src.score,
            best_actions=best,
        )
        for aid in best:
            for _, ckey in src.children[aid]:
                if ckey not in nodes:
                    queue.append(ckey)
    return StateGraph(kind="reduced", root=g.root, nodes=nodes)
