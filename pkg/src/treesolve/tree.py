"""Decision tree extraction from the reduced graph.

Every action kept in the reduced graph is score-optimal, so any choice
of one action per state yields a tree with the optimal expected reward.
The secondary objective picks among them: by default the probability-
weighted subtree node count, or a seeded uniform random choice. Reach
probabilities are exact fractions accumulated from the root.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .core import Scenario, TOL, reward
from .errors import InternalCheckError
from .graph import NodeRecord, StateGraph, _tables, topological_keys

TIE_BREAKS = ("node-count", "random")


def subtree_sizes(g: StateGraph) -> dict[bytes, int]:
    """Smallest achievable tree node count below each reduced-graph state.

    A leaf counts 1; an interior node counts itself plus the children of
    its best action, minimizing over the score-optimal actions.
    """
    try:
        return g._subtree_sizes  # type: ignore[attr-defined]
    except AttributeError:
        pass
    sizes: dict[bytes, int] = {}
    for key in reversed(topological_keys(g)):
        rec = g.nodes[key]
        if not rec.best_actions:
            sizes[key] = 1
        else:
            sizes[key] = 1 + min(
                sum(sizes[ckey] for _, ckey in rec.children[aid])
                for aid in rec.best_actions
            )
    g._subtree_sizes = sizes
    return sizes


def subtree_size(g: StateGraph, key: bytes) -> int:
    return subtree_sizes(g)[key]


def select_tree(
    g: StateGraph,
    scn: Scenario,
    tie_break: str = "node-count",
    seed: int | None = None,
) -> StateGraph:
    """One optimal decision tree out of the reduced graph.

    tie_break "node-count" picks the action minimizing the expected
    subtree node count (ties to the lowest catalog index); "random" picks
    uniformly among the score-optimal actions, seeded.
    """
    if tie_break not in TIE_BREAKS:
        raise ValueError(f"unknown tie break {tie_break!r}")
    if g.root_node().best_actions is None:
        raise InternalCheckError("tree selection requires a reduced graph")
    t = _tables(scn)
    rng = random.Random(seed)
    sizes = subtree_sizes(g) if tie_break == "node-count" else None

    def choose(rec: NodeRecord) -> str:
        ranked = sorted(rec.best_actions, key=lambda aid: scn.index[aid])
        if tie_break == "random":
            return rng.choice(ranked)
        best_aid = None
        best_value = None
        for aid in ranked:
            probs = t.prob_frac[scn.index[aid]]
            value = sum(
                (probs[oid] * sizes[ckey] for oid, ckey in rec.children[aid]),
                Fraction(0),
            )
            if best_value is None or value < best_value:
                best_aid, best_value = aid, value
        return best_aid

    nodes: dict[bytes, NodeRecord] = {}
    stack = [(g.root, Fraction(1))]
    while stack:
        key, reach = stack.pop()
        if key in nodes:
            raise InternalCheckError("tree paths reconverged on one state")
        src = g.nodes[key]
        children = {}
        if src.best_actions:
            aid = choose(src)
            children[aid] = src.children[aid]
            probs = t.prob_frac[scn.index[aid]]
            for oid, ckey in src.children[aid]:
                stack.append((ckey, reach * probs[oid]))
        nodes[key] = NodeRecord(
            state=src.state,
            pruned_actions=src.pruned_actions,
            children=children,
            score=src.score,
            best_actions=src.best_actions,
            reach_probability=reach,
        )
    return StateGraph(kind="tree", root=g.root, nodes=nodes)


def random_tie_break(g: StateGraph, scn: Scenario, seed: int) -> StateGraph:
    return select_tree(g, scn, tie_break="random", seed=seed)


def chosen_action(rec: NodeRecord) -> str | None:
    """The single prescribed action of a tree node, None at leaves."""
    if not rec.children:
        return None
    (aid,) = rec.children.keys()
    return aid


def expected_reward(tree: StateGraph, scn: Scenario) -> tuple[Fraction, Fraction]:
    """(normalized, raw) expectation over the tree's leaf states."""
    total_p = Fraction(0)
    total = Fraction(0)
    for key, rec in tree.nodes.items():
        if rec.children:
            continue
        total_p += rec.reach_probability
        total += rec.reach_probability * reward(scn, rec.state)
    if abs(total_p - 1) > TOL:
        raise InternalCheckError(f"leaf probabilities sum to {float(total_p)}, not 1")
    return total, total * scn.reward_scale
