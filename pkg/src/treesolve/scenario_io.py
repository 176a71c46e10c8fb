"""Scenario document parsing, validation, and serialization.

The wire format is a single JSON object:

    {
      "schema_version": 1,
      "budget": "6",
      "actions": [
        {"id": "a4", "cost": "1",
         "outcomes": [{"id": 1, "probability": "0.7"},
                      {"id": 2, "probability": "0.3"}],
         "prereq": {"or": [["a1", 2], ["a3", 2]]}}
      ],
      "rewards": [{"action": "a5", "outcome": 2, "value": "50"}]
    }

Numeric fields (budget, cost, probability, value) are decimal strings so
values like 0.4 stay exact; "n/d" rational strings and plain JSON numbers
are also accepted. Unknown fields are rejected with a field path in the
error. Serialization is deterministic byte-for-byte.
"""
from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

from .core import (
    MAX_OUTCOME_ID,
    TOL,
    ActionSpec,
    OutcomeSpec,
    PrereqExpr,
    Scenario,
)
from .errors import ScenarioError

SCHEMA_VERSION = 1

_TOP_KEYS = {"schema_version", "budget", "actions", "rewards"}
_ACTION_KEYS = {"id", "cost", "outcomes", "prereq", "repeatable"}
_OUTCOME_KEYS = {"id", "probability"}
_PREREQ_KEYS = {"and", "or", "notand", "notor"}
_REWARD_KEYS = {"action", "outcome", "value"}


def _fail(message: str, field: str) -> ScenarioError:
    return ScenarioError(f"{field}: {message}", field=field)


def _require_dict(value, field: str) -> dict:
    if not isinstance(value, dict):
        raise _fail("expected an object", field)
    return value


def _require_list(value, field: str) -> list:
    if not isinstance(value, list):
        raise _fail("expected a list", field)
    return value


def _reject_unknown(obj: dict, allowed: set[str], field: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise _fail(f"unknown field(s) {sorted(unknown)}", field)


def _number(value, field: str) -> Fraction:
    """Exact numeric parse: decimal string, "n/d", int, or float."""
    if isinstance(value, bool):
        raise _fail("expected a number", field)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise _fail(f"bad number {value!r}", field) from None
    if isinstance(value, (int, float)):
        return Fraction(value)
    raise _fail("expected a number", field)


def _number_text(x: Fraction) -> str:
    """Shortest exact text for a fraction: decimal when terminating, else n/d."""
    num, den = x.numerator, x.denominator
    if den == 1:
        return str(num)
    d = den
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d != 1:
        return f"{num}/{den}"
    k = 1
    while 10**k % den:
        k += 1
    digits = str(abs(num) * (10**k // den)).rjust(k + 1, "0")
    sign = "-" if num < 0 else ""
    return f"{sign}{digits[:-k]}.{digits[-k:]}"


def _outcome_id(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise _fail("expected an integer outcome id", field)
    if not 1 <= value <= MAX_OUTCOME_ID:
        raise _fail(f"outcome id {value} outside 1..{MAX_OUTCOME_ID}", field)
    return value


def _pair(value, field: str) -> tuple[str, int]:
    pair = _require_list(value, field)
    if len(pair) != 2 or not isinstance(pair[0], str):
        raise _fail("expected an [action_id, outcome_id] pair", field)
    return pair[0], _outcome_id(pair[1], field)


def _parse_prereq(obj, field: str) -> PrereqExpr:
    obj = _require_dict(obj, field)
    _reject_unknown(obj, _PREREQ_KEYS, field)
    groups = {}
    for key in ("and", "or", "notand", "notor"):
        raw = _require_list(obj.get(key, []), f"{field}.{key}")
        groups[key] = frozenset(
            _pair(item, f"{field}.{key}[{i}]") for i, item in enumerate(raw)
        )
    return PrereqExpr(
        and_set=groups["and"],
        or_set=groups["or"],
        notand_set=groups["notand"],
        notor_set=groups["notor"],
    )


def _parse_action(obj, field: str) -> ActionSpec:
    obj = _require_dict(obj, field)
    _reject_unknown(obj, _ACTION_KEYS, field)
    for key in ("id", "cost", "outcomes"):
        if key not in obj:
            raise _fail(f"missing required field {key!r}", field)
    if not isinstance(obj["id"], str) or not obj["id"]:
        raise _fail("action id must be a non-empty string", f"{field}.id")
    repeatable = obj.get("repeatable", False)
    if not isinstance(repeatable, bool):
        raise _fail("expected a boolean", f"{field}.repeatable")
    outcomes = []
    raw_outcomes = _require_list(obj["outcomes"], f"{field}.outcomes")
    for i, raw in enumerate(raw_outcomes):
        ofield = f"{field}.outcomes[{i}]"
        raw = _require_dict(raw, ofield)
        _reject_unknown(raw, _OUTCOME_KEYS, ofield)
        if "id" not in raw or "probability" not in raw:
            raise _fail("outcome needs id and probability", ofield)
        outcomes.append(
            OutcomeSpec(
                outcome_id=_outcome_id(raw["id"], f"{ofield}.id"),
                probability=_number(raw["probability"], f"{ofield}.probability"),
            )
        )
    total = sum((o.probability for o in outcomes), Fraction(0))
    if outcomes and total != 1 and abs(total - 1) <= TOL:
        # Float-sourced probabilities may miss 1 by an ulp; rescale so the
        # exact-arithmetic invariants downstream hold.
        outcomes = [
            OutcomeSpec(o.outcome_id, o.probability / total) for o in outcomes
        ]
    return ActionSpec(
        id=obj["id"],
        cost=_number(obj["cost"], f"{field}.cost"),
        outcomes=tuple(outcomes),
        prereq=_parse_prereq(obj.get("prereq", {}), f"{field}.prereq"),
        repeatable=repeatable,
    )


def scenario_from_document(doc: dict) -> Scenario:
    """Validate a parsed JSON document into a Scenario."""
    doc = _require_dict(doc, "document")
    _reject_unknown(doc, _TOP_KEYS, "document")
    for key in _TOP_KEYS:
        if key not in doc:
            raise _fail(f"missing required field {key!r}", "document")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise _fail(
            f"unsupported schema_version {doc['schema_version']!r}", "schema_version"
        )
    actions = tuple(
        _parse_action(a, f"actions[{i}]")
        for i, a in enumerate(_require_list(doc["actions"], "actions"))
    )
    rewards = []
    for i, raw in enumerate(_require_list(doc["rewards"], "rewards")):
        rfield = f"rewards[{i}]"
        raw = _require_dict(raw, rfield)
        _reject_unknown(raw, _REWARD_KEYS, rfield)
        for key in _REWARD_KEYS:
            if key not in raw:
                raise _fail(f"missing required field {key!r}", rfield)
        if not isinstance(raw["action"], str):
            raise _fail("expected an action id string", f"{rfield}.action")
        rewards.append(
            (
                (raw["action"], _outcome_id(raw["outcome"], f"{rfield}.outcome")),
                _number(raw["value"], f"{rfield}.value"),
            )
        )
    return Scenario(
        actions=actions,
        root_budget=_number(doc["budget"], "budget"),
        reward_pairs=tuple(rewards),
    )


def scenario_to_document(scn: Scenario) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "budget": _number_text(scn.root_budget),
        "actions": [],
        "rewards": [
            {"action": aid, "outcome": oid, "value": _number_text(value)}
            for (aid, oid), value in scn.reward_pairs
        ],
    }
    for a in scn.actions:
        entry = {
            "id": a.id,
            "cost": _number_text(a.cost),
            "outcomes": [
                {"id": o.outcome_id, "probability": _number_text(o.probability)}
                for o in a.outcomes
            ],
        }
        if a.repeatable:
            entry["repeatable"] = True
        prereq = {}
        for key, group in (
            ("and", a.prereq.and_set),
            ("or", a.prereq.or_set),
            ("notand", a.prereq.notand_set),
            ("notor", a.prereq.notor_set),
        ):
            if group:
                prereq[key] = [list(p) for p in sorted(group)]
        if prereq:
            entry["prereq"] = prereq
        doc["actions"].append(entry)
    return doc


def parse_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"not valid JSON: {exc}", field="document") from None
    return scenario_from_document(doc)


def serialize_scenario(scn: Scenario) -> str:
    return json.dumps(scenario_to_document(scn), indent=2, sort_keys=True) + "\n"


def load_scenario(path: str) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def builtin_scenario_text(name: str = "illustrative") -> str:
    ref = resources.files("treesolve.data").joinpath(f"{name}.json")
    return ref.read_text(encoding="utf-8")


def builtin_scenario(name: str = "illustrative") -> Scenario:
    return parse_scenario(builtin_scenario_text(name))
