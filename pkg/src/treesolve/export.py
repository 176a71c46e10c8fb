"""Tree export: deterministic tree-json for machines, dot for eyeballs.

tree-json keys nodes by the comma-separated state text. Exact values
(reach probabilities, budgets) are carried both as floats and as exact
number strings; byte output is deterministic (sorted keys, repr floats).
"""
from __future__ import annotations

import json

from .core import Scenario, remaining_budget, reward, reward_raw, state_text
from .graph import StateGraph, _tables
from .scenario_io import _number_text
from .tree import chosen_action

TREE_FORMAT_VERSION = 1

FORMATS = ("tree-json", "dot")


def tree_document(tree: StateGraph, scn: Scenario) -> dict:
    t = _tables(scn)
    nodes = {}
    for key, rec in tree.nodes.items():
        aid = chosen_action(rec)
        children = {}
        if aid is not None:
            probs = t.prob_frac[scn.index[aid]]
            for oid, ckey in rec.children[aid]:
                children[str(oid)] = {
                    "key": state_text(tuple(ckey)),
                    "probability": float(probs[oid]),
                    "probability_exact": _number_text(probs[oid]),
                }
        nodes[state_text(rec.state)] = {
            "state": list(rec.state),
            "action": aid,
            "score": rec.score,
            "reward": {
                "normalized": float(reward(scn, rec.state)),
                "raw": float(reward_raw(scn, rec.state)),
            },
            "reach_probability": float(rec.reach_probability),
            "reach_probability_exact": _number_text(rec.reach_probability),
            "remaining_budget": float(remaining_budget(scn, rec.state)),
            "children": children,
        }
    return {
        "format_version": TREE_FORMAT_VERSION,
        "root": state_text(tree.root_node().state),
        "reward_scale": float(scn.reward_scale),
        "nodes": nodes,
    }


def _dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def export_tree(tree: StateGraph, scn: Scenario, format: str = "tree-json") -> str:
    if format == "tree-json":
        return _dump_json(tree_document(tree, scn))
    if format == "dot":
        return _export_dot(tree, scn)
    raise ValueError(f"unknown export format {format!r}")


def reexport_tree_json(text: str) -> str:
    """Canonical re-serialization; byte-identical for our own output."""
    return _dump_json(json.loads(text))


def _export_dot(tree: StateGraph, scn: Scenario) -> str:
    t = _tables(scn)
    lines = ["digraph decision_tree {", "  node [shape=box];"]
    for key in sorted(tree.nodes):
        rec = tree.nodes[key]
        name = state_text(rec.state)
        aid = chosen_action(rec)
        if aid is None:
            label = f"reward {float(reward_raw(scn, rec.state)):g}"
        else:
            label = aid
        lines.append(f'  "{name}" [label="{label}"];')
        if aid is None:
            continue
        probs = t.prob_frac[scn.index[aid]]
        for oid, ckey in rec.children[aid]:
            child_name = state_text(tuple(ckey))
            lines.append(
                f'  "{name}" -> "{child_name}" [label="{oid} ({float(probs[oid]):g})"];'
            )
    lines.append("}")
    return "\n".join(lines) + "\n"
