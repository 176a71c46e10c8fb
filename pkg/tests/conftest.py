import json

import pytest

from treesolve.errors import ScenarioError
from treesolve.generator import GeneratorParams, generate_instance
from treesolve.pipeline import solve
from treesolve.scenario_io import builtin_scenario, builtin_scenario_text


@pytest.fixture(scope="session")
def illustrative():
    return builtin_scenario()


@pytest.fixture(scope="session")
def illustrative_doc():
    return json.loads(builtin_scenario_text())


@pytest.fixture(scope="session")
def illustrative_result(illustrative):
    return solve(illustrative)


def corpus_params(count, start_seed=0, max_actions=12, max_budget=8):
    """A deterministic spread of generator parameters for property tests."""
    out = []
    i = 0
    while len(out) < count:
        n = 4 + i % (max_actions - 3)
        b = 2 + i % (max_budget - 1)
        out.append(GeneratorParams(n_actions=n, budget=b, seed=start_seed + i))
        i += 1
    return out


def make_corpus(count, start_seed=0, max_actions=12, max_budget=8, max_outcomes=3):
    """Generate `count` scenarios, skipping seeds the generator gives up on."""
    scenarios = []
    i = 0
    while len(scenarios) < count:
        n = 4 + i % (max_actions - 3)
        b = 2 + i % (max_budget - 1)
        try:
            scenarios.append(
                generate_instance(
                    GeneratorParams(
                        n_actions=n, budget=b, seed=start_seed + i, max_outcomes=max_outcomes
                    )
                )
            )
        except ScenarioError:
            pass
        i += 1
    return scenarios
