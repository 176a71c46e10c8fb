from fractions import Fraction

import pytest

from treesolve.core import state_key
from treesolve.pipeline import resolve, solve
from treesolve.tree import (
    chosen_action,
    expected_reward,
    random_tie_break,
    select_tree,
    subtree_size,
    subtree_sizes,
)

ROOT_SCORE = Fraction(105459, 1250000)


def test_tree_size(illustrative_result):
    assert len(illustrative_result.tree) == 37


def test_tree_shape_at_the_top(illustrative_result):
    tree = illustrative_result.tree
    root = tree.root_node()
    assert chosen_action(root) == "a1"
    children = dict(root.children["a1"])
    assert chosen_action(tree.node(children[1])) == "a3"
    assert chosen_action(tree.node(children[2])) == "a4"


def test_every_tree_node_has_at_most_one_action(illustrative_result):
    for rec in illustrative_result.tree.nodes.values():
        assert len(rec.children) <= 1
        if rec.children:
            assert chosen_action(rec) in rec.best_actions


def test_expected_reward(illustrative_result):
    normalized, raw = expected_reward(
        illustrative_result.tree, illustrative_result.scenario
    )
    assert normalized == ROOT_SCORE
    assert raw == ROOT_SCORE * 100
    assert illustrative_result.score_normalized == ROOT_SCORE
    assert illustrative_result.score_raw == Fraction(105459, 12500)


def test_reach_probabilities(illustrative_result):
    tree = illustrative_result.tree
    assert tree.root_node().reach_probability == 1
    total = sum(tree.node(k).reach_probability for k in tree.leaf_keys())
    assert total == 1
    walker = tree.node(state_key((2, 0, 0, 2, 0, 0, 0)))
    assert chosen_action(walker) == "a5"
    assert walker.reach_probability == Fraction(9, 50)


def test_subtree_sizes_of_reduced_graph(illustrative_result):
    rg = illustrative_result.reduced_graph
    sizes = subtree_sizes(rg)
    assert all(sizes[key] == 1 for key in rg.leaf_keys())
    assert sizes[rg.root] == 33
    assert len(illustrative_result.tree) >= sizes[rg.root]


def test_box_subtree_sizes(illustrative):
    result = resolve(illustrative, (2, 0, 2, 2, 1, 0, 0), Fraction(2))
    rg = result.reduced_graph
    sizes = subtree_sizes(rg)
    root = rg.root_node()
    assert root.best_actions == ("a2", "a7")
    branch = {
        aid: 1 + sum(sizes[ckey] for _, ckey in root.children[aid])
        for aid in root.best_actions
    }
    assert branch == {"a2": 7, "a7": 3}
    assert sizes[rg.root] == min(branch.values()) == 3
    assert subtree_size(rg, rg.root) == 3
    assert chosen_action(result.tree.root_node()) == "a7"
    assert len(result.tree) == 3


def test_selection_is_deterministic(illustrative):
    a = solve(illustrative)
    b = solve(illustrative)
    assert set(a.tree.nodes) == set(b.tree.nodes)
    for key in a.tree.nodes:
        assert chosen_action(a.tree.node(key)) == chosen_action(b.tree.node(key))


def test_random_tie_break_preserves_score(illustrative_result):
    rg = illustrative_result.reduced_graph
    scn = illustrative_result.scenario
    for seed in range(5):
        tree = random_tie_break(rg, scn, seed)
        normalized, _ = expected_reward(tree, scn)
        assert normalized == ROOT_SCORE
        assert set(tree.nodes) <= set(rg.nodes)


def test_random_tie_break_same_seed_same_tree(illustrative_result):
    rg = illustrative_result.reduced_graph
    scn = illustrative_result.scenario
    a = random_tie_break(rg, scn, 7)
    b = random_tie_break(rg, scn, 7)
    assert set(a.nodes) == set(b.nodes)
    for key in a.nodes:
        assert chosen_action(a.node(key)) == chosen_action(b.node(key))


def test_select_tree_requires_reduced_graph(illustrative_result):
    with pytest.raises(Exception):
        select_tree(illustrative_result.full_graph, illustrative_result.scenario)


def test_tie_break_minimizes_weighted_size(illustrative_result):
    # a1 and a2 tie on score at the root; a1 wins the node-count tie-break
    # (probability-weighted subtree size 17 vs 26.6).
    rg = illustrative_result.reduced_graph
    assert rg.root_node().best_actions == ("a1", "a2")
    assert chosen_action(illustrative_result.tree.root_node()) == "a1"


def test_corpus_tree_invariants():
    from conftest import make_corpus

    for scn in make_corpus(15, start_seed=1500, max_actions=8, max_budget=6):
        result = solve(scn)
        tree = result.tree
        sizes = subtree_sizes(result.reduced_graph)
        assert len(tree) >= sizes[result.reduced_graph.root]
        total = sum(tree.node(k).reach_probability for k in tree.leaf_keys())
        assert total == 1
        normalized, _ = expected_reward(tree, scn)
        assert abs(float(normalized) - result.full_graph.root_node().score) < 1e-9
