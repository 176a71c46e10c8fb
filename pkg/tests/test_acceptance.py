"""End-to-end acceptance checks, one test per shipping criterion.

Run with `pytest -v tests/test_acceptance.py` to get one pass/fail line
per criterion. Golden values were frozen from the independent reference
implementations in oracle.py before the solver was written.
"""
import itertools
import math
import random
import time
from fractions import Fraction

import pytest
from fastapi.testclient import TestClient

from conftest import make_corpus
from oracle import best_score, rewarding_sets_brute
from treesolve.bench import run_bench
from treesolve.core import StateDomain, state_index, state_key
from treesolve.generator import GeneratorParams
from treesolve.lpcheck import check_against_dp
from treesolve.pipeline import resolve, solve
from treesolve.rewarding import enumerate_rewarding_sets
from treesolve.scenario_io import scenario_to_document
from treesolve.server import create_app
from treesolve.tree import chosen_action, subtree_sizes

ORACLE_ROOT_SCORE = Fraction(105459, 1250000)  # 0.0843672 normalized


@pytest.fixture(scope="module")
def equivalence_corpus():
    """200 seeded scenarios (4-12 actions, budget 2-8), solved both ways."""
    corpus = []
    for scn in make_corpus(200, start_seed=30000, max_actions=12, max_budget=8):
        corpus.append((scn, solve(scn), solve(scn, naive=True)))
    return corpus


def test_c01_golden_tree_structure(illustrative):
    """Budget-6 solve of the illustrative scenario yields the published tree."""
    start = time.monotonic()
    result = solve(illustrative)
    elapsed = time.monotonic() - start
    tree = result.tree
    root = tree.root_node()
    assert chosen_action(root) == "a1"
    children = dict(root.children["a1"])
    assert chosen_action(tree.node(children[1])) == "a3"
    assert chosen_action(tree.node(children[2])) == "a4"
    assert elapsed < 5.0


def test_c02_golden_expected_reward(illustrative, illustrative_doc):
    """Root score equals the exhaustive-policy-enumeration oracle value."""
    assert best_score(illustrative_doc) == ORACLE_ROOT_SCORE
    result = solve(illustrative)
    assert abs(float(result.score_normalized) - 0.0843672) < 1e-6
    assert abs(float(result.score_raw) - 8.43672) < 1e-4
    assert result.score_normalized == ORACLE_ROOT_SCORE


def test_c03_golden_rewarding_sets(illustrative):
    """Enumeration returns exactly the four published sets, any order."""
    bundle = enumerate_rewarding_sets(illustrative)
    got = {(rs.pairs, rs.target_reward) for rs in bundle}
    assert got == {
        (frozenset({("a3", 2), ("a7", 2)}), Fraction(1)),
        (frozenset({("a1", 2), ("a4", 2), ("a5", 2)}), Fraction(1, 2)),
        (frozenset({("a1", 2), ("a2", 2), ("a4", 2), ("a6", 2)}), Fraction(1, 10)),
        (frozenset({("a2", 2), ("a3", 2), ("a4", 2), ("a6", 2)}), Fraction(1, 10)),
    }


# The published score table for the subgraph under [2,0,2,2,1,0,0] with
# remaining budget 2: state -> (pruned actions, score, best actions).
SCORE_TABLE = {
    (2, 0, 2, 2, 1, 0, 0): (("a2", "a7"), 0.1, ("a2", "a7")),
    (2, 1, 2, 2, 1, 0, 0): (("a7",), 0.1, ("a7",)),
    (2, 2, 2, 2, 1, 0, 0): (("a6", "a7"), 0.1, ("a7",)),
    (2, 0, 2, 2, 1, 0, 1): ((), 0.0, ()),
    (2, 0, 2, 2, 1, 0, 2): ((), 1.0, ()),
    (2, 1, 2, 2, 1, 0, 1): ((), 0.0, ()),
    (2, 1, 2, 2, 1, 0, 2): ((), 1.0, ()),
    (2, 2, 2, 2, 1, 1, 0): ((), 0.0, ()),
    (2, 2, 2, 2, 1, 2, 0): ((), 0.1, ()),
    (2, 2, 2, 2, 1, 0, 1): ((), 0.0, ()),
    (2, 2, 2, 2, 1, 0, 2): ((), 1.0, ()),
}


def test_c04_golden_score_table(illustrative):
    """Scores and best-action sets of the published mid-mission subgraph."""
    from treesolve.graph import best_actions_at

    result = resolve(illustrative, (2, 0, 2, 2, 1, 0, 0), Fraction(2))
    g = result.full_graph
    assert len(g) == len(SCORE_TABLE) == 11
    for state, (pruned, score, best) in SCORE_TABLE.items():
        rec = g.node(state_key(state))
        assert rec.pruned_actions == pruned, state
        assert abs(rec.score - score) < 1e-9, state
        assert best_actions_at(g, state_key(state), illustrative) == best, state


def test_c05_golden_subtree_sizes(illustrative):
    """Tie-break sizes of the published example: min(7, 3) = 3, leaves 1."""
    result = resolve(illustrative, (2, 0, 2, 2, 1, 0, 0), Fraction(2))
    rg = result.reduced_graph
    sizes = subtree_sizes(rg)
    assert all(sizes[key] == 1 for key in rg.leaf_keys())
    root = rg.root_node()
    branch = {
        aid: 1 + sum(sizes[ckey] for _, ckey in root.children[aid])
        for aid in root.best_actions
    }
    assert branch == {"a2": 7, "a7": 3}
    assert sizes[rg.root] == min(7, 3) == 3
    assert chosen_action(result.tree.root_node()) == "a7"


def test_c06_pipeline_equivalence(equivalence_corpus):
    """Naive and accelerated pipelines agree on 200 seeded scenarios."""
    assert len(equivalence_corpus) >= 200
    for scn, accel, naive in equivalence_corpus:
        assert abs(accel.stats.score_root - naive.stats.score_root) < 1e-9, scn
        tree_keys = set(accel.tree.nodes)
        reduced_keys = set(accel.reduced_graph.nodes)
        accel_keys = set(accel.full_graph.nodes)
        naive_keys = set(naive.full_graph.nodes)
        assert tree_keys <= reduced_keys <= accel_keys <= naive_keys, scn


def test_c07_dp_lp_agreement(equivalence_corpus):
    """LP relaxation reproduces every DP score and tight set on the corpus."""
    highs_checked = 0
    for scn, accel, _ in equivalence_corpus:
        report = check_against_dp(accel.full_graph, scn, backend="topological")
        assert report.ok, scn
        assert report.max_score_diff <= 1e-7
        if len(accel.full_graph) <= 600 and highs_checked < 25:
            report = check_against_dp(accel.full_graph, scn, backend="highs")
            assert report.ok, scn
            assert report.max_score_diff <= 1e-7
            highs_checked += 1
    assert highs_checked >= 10


def test_c08_rewarding_sets_match_brute_force(illustrative):
    """Cut-based enumeration equals exhaustive subset search on 50+ scenarios."""
    checked = 0
    corpus = [illustrative] + make_corpus(
        60, start_seed=500, max_actions=6, max_budget=6, max_outcomes=2
    )
    for scn in corpus:
        if sum(len(a.outcomes) for a in scn.actions) > 12:
            continue
        expected = set(rewarding_sets_brute(scenario_to_document(scn)))
        got = {(rs.pairs, rs.target_reward) for rs in enumerate_rewarding_sets(scn)}
        assert got == expected, scn
        checked += 1
    assert checked >= 50


def test_c09_linear_scaling():
    """Total solve time grows about linearly with full-graph size."""
    ladder = [
        (12, 7, 0),
        (16, 9, 4),
        (12, 7, 1),
        (16, 9, 1),
        (20, 11, 0),
        (12, 7, 2),
        (14, 8, 0),
        (18, 10, 3),
        (20, 11, 7),
        (22, 12, 2),
        (24, 13, 1),
    ]
    params = [
        GeneratorParams(n_actions=n, budget=b, seed=s, density=0.8) for n, b, s in ladder
    ]
    start = time.monotonic()
    report = run_bench(params, naive_max_states=0, timeout=120)
    elapsed = time.monotonic() - start
    ok_rows = [row for row in report.rows if row.ok]
    assert len(ok_rows) >= 8
    sizes = [row.stats.n_full for row in ok_rows]
    assert max(sizes) / min(sizes) >= 100  # two orders of magnitude
    slope = report.slope()
    assert slope is not None
    assert 0.75 <= slope <= 1.25, slope
    assert elapsed <= 900


def test_c10_state_index_bijectivity():
    """Mixed-radix indexing collides nowhere, including the {0..9}^5 domain."""
    rng = random.Random(99)
    for _ in range(30):
        dims = tuple(
            tuple(sorted(rng.sample(range(9), rng.randint(1, 4))))
            for _ in range(rng.randint(1, 6))
        )
        dom = StateDomain(dims=dims)
        indices = {state_index(dom, s) for s in itertools.product(*dims)}
        assert len(indices) == dom.size()
    decimal = StateDomain(dims=(tuple(range(10)),) * 5)
    indices = {state_index(decimal, s) for s in itertools.product(*decimal.dims)}
    assert len(indices) == 10**5
    assert min(indices) == 11111 and max(indices) == 111110


def test_c11_resolve_consistency(illustrative, illustrative_doc, illustrative_result):
    """Re-solving from any interior tree node reproduces that node's score."""
    from treesolve.core import remaining_budget

    client = TestClient(create_app())
    tree = illustrative_result.tree
    interior = [rec for rec in tree.nodes.values() if rec.children]
    assert interior
    for rec in interior:
        payload = {
            "scenario": illustrative_doc,
            "current_state": list(rec.state),
            "remaining_budget": float(remaining_budget(illustrative, rec.state)),
        }
        response = client.post("/v1/resolve", json=payload)
        assert response.status_code == 200, rec.state
        got = response.json()["score"]["normalized"]
        assert abs(got - rec.score) < 1e-9, rec.state
