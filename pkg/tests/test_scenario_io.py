import copy
import json
from fractions import Fraction

import pytest

from treesolve.errors import ScenarioError
from treesolve.scenario_io import (
    builtin_scenario,
    builtin_scenario_text,
    parse_scenario,
    scenario_from_document,
    scenario_to_document,
    serialize_scenario,
)


def test_round_trip_illustrative(illustrative):
    assert parse_scenario(serialize_scenario(illustrative)) == illustrative


def test_round_trip_generated():
    from conftest import make_corpus

    for scn in make_corpus(20, start_seed=100):
        assert parse_scenario(serialize_scenario(scn)) == scn


def test_serialize_is_stable(illustrative):
    text = serialize_scenario(illustrative)
    again = serialize_scenario(parse_scenario(text))
    assert text == again
    assert text.endswith("\n")


def test_builtin_matches_packaged_text():
    doc = json.loads(builtin_scenario_text())
    assert scenario_from_document(doc) == builtin_scenario()


def test_probabilities_parse_exactly(illustrative):
    a1 = illustrative.action("a1")
    assert [o.probability for o in a1.outcomes] == [Fraction(2, 5), Fraction(3, 5)]
    assert illustrative.root_budget == 6


def test_number_formats_are_equivalent(illustrative_doc):
    doc = copy.deepcopy(illustrative_doc)
    doc["actions"][0]["outcomes"][0]["probability"] = "2/5"
    doc["actions"][0]["outcomes"][1]["probability"] = "3/5"
    doc["budget"] = 6
    scn = scenario_from_document(doc)
    assert scn.action("a1").outcomes[0].probability == Fraction(2, 5)
    assert scn.root_budget == 6
    # Binary floats land within a rounding error and get rescaled to sum 1.
    doc["actions"][0]["outcomes"][0]["probability"] = 0.4
    doc["actions"][0]["outcomes"][1]["probability"] = 0.6
    scn = scenario_from_document(doc)
    probs = [o.probability for o in scn.action("a1").outcomes]
    assert sum(probs) == 1
    assert abs(float(probs[0]) - 0.4) < 1e-12


def test_float_probabilities_renormalize():
    doc = {
        "schema_version": 1,
        "budget": 2,
        "actions": [
            {
                "id": "x",
                "cost": 1,
                "outcomes": [
                    {"id": 1, "probability": 0.1},
                    {"id": 2, "probability": 0.2},
                    {"id": 3, "probability": 0.7},
                ],
            }
        ],
        "rewards": [{"action": "x", "outcome": 3, "value": 1}],
    }
    scn = scenario_from_document(doc)
    assert sum(o.probability for o in scn.action("x").outcomes) == 1


@pytest.mark.parametrize(
    "mutate,field_hint",
    [
        (lambda d: d.pop("budget"), "document"),
        (lambda d: d.update(extra=1), "document"),
        (lambda d: d.update(schema_version=9), "schema_version"),
        (lambda d: d["actions"][0].update(bogus=1), "actions[0]"),
        (lambda d: d["actions"][0].update(id=""), "actions[0].id"),
        (lambda d: d["actions"][0]["outcomes"][0].update(id=0), "outcomes[0]"),
        (lambda d: d["actions"][0]["outcomes"][0].update(id=999), "outcomes[0]"),
        (lambda d: d["actions"][0]["outcomes"][0].update(probability="x"), "probability"),
        (lambda d: d["actions"][0]["outcomes"][0].update(probability=True), "probability"),
        (lambda d: d["actions"][3]["prereq"].update(xor=[["a1", 1]]), "prereq"),
        (lambda d: d["actions"][3]["prereq"].update({"or": [["a1"]]}), "or"),
        (lambda d: d["rewards"][0].pop("value"), "rewards[0]"),
        (lambda d: d["rewards"][0].update(action=7), "rewards[0].action"),
        (lambda d: d.update(actions=[]), "actions"),
    ],
)
def test_rejects_malformed_documents(illustrative_doc, mutate, field_hint):
    doc = copy.deepcopy(illustrative_doc)
    mutate(doc)
    with pytest.raises(ScenarioError) as info:
        scenario_from_document(doc)
    assert field_hint in (info.value.field or "")


def test_rejects_semantic_problems(illustrative_doc):
    cases = [
        lambda d: d["actions"][0].update(cost=-1),
        lambda d: d["actions"][0]["outcomes"].append({"id": 1, "probability": "0.1"}),
        lambda d: d["actions"][4]["prereq"]["and"].append(["missing", 1]),
        lambda d: d["actions"][4]["prereq"]["and"].append(["a4", 9]),
        lambda d: d["rewards"].append({"action": "a5", "outcome": 2, "value": 1}),
        lambda d: d["rewards"][0].update(value=0),
        lambda d: d["rewards"][0].update(outcome=3),
        lambda d: d.update(budget=-1),
        lambda d: d["actions"].append(copy.deepcopy(d["actions"][0])),
    ]
    for mutate in cases:
        doc = copy.deepcopy(illustrative_doc)
        mutate(doc)
        with pytest.raises(ScenarioError):
            scenario_from_document(doc)


def test_parse_scenario_rejects_non_object():
    with pytest.raises(ScenarioError):
        parse_scenario("[]")
    with pytest.raises(ScenarioError):
        parse_scenario("not json")


def test_document_omits_defaults(illustrative):
    doc = scenario_to_document(illustrative)
    a1 = doc["actions"][0]
    assert "repeatable" not in a1
    assert "prereq" not in a1
    a5 = doc["actions"][4]
    assert sorted(a5["prereq"]) == ["and", "notand"]


def test_fractional_values_survive_round_trip():
    doc = {
        "schema_version": 1,
        "budget": "7/2",
        "actions": [
            {
                "id": "x",
                "cost": "1/3",
                "outcomes": [
                    {"id": 1, "probability": "1/3"},
                    {"id": 2, "probability": "2/3"},
                ],
            }
        ],
        "rewards": [{"action": "x", "outcome": 2, "value": "1/10"}],
    }
    scn = scenario_from_document(doc)
    assert scn.root_budget == Fraction(7, 2)
    assert scn.action("x").cost == Fraction(1, 3)
    assert parse_scenario(serialize_scenario(scn)) == scn
