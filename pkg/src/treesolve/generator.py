"""Random scenario generation: layered AND/OR dependency DAGs.

Actions are placed into layers: a set of sources, a few middle layers,
and a single terminal action whose success carries the only reward
(raw value 1). Each non-source action gets exactly one gate type, AND or
OR, wired to 1-3 specific outcomes of actions in earlier layers. Unit
costs, no preclusions. Outcome probabilities are multiples of 0.05 so
documents stay exact decimals. Generation is fully determined by the
seed; instances whose rewarding sets are empty or unaffordable within
budget are rejected and regenerated from the same stream, up to a
bounded number of attempts.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .core import ActionSpec, OutcomeSpec, PrereqExpr, Scenario
from .errors import ScenarioError
from .rewarding import enumerate_rewarding_sets

MAX_ATTEMPTS = 20


@dataclass(frozen=True)
class GeneratorParams:
    n_actions: int
    budget: Fraction
    min_outcomes: int = 2
    max_outcomes: int = 3
    density: float = 0.5  # chance of a second (and weaker third) gate input
    seed: int = 0

    def __post_init__(self):
        if self.n_actions < 2:
            raise ScenarioError("generator needs at least 2 actions", field="n_actions")
        if not 1 <= self.min_outcomes <= self.max_outcomes <= 8:
            raise ScenarioError("bad outcome count range", field="min_outcomes")
        if not 0 <= self.density <= 1:
            raise ScenarioError("density must lie in [0, 1]", field="density")
        if Fraction(self.budget) <= 0:
            raise ScenarioError("budget must be positive", field="budget")


def _probabilities(rng: random.Random, k: int) -> list[Fraction]:
    """Random composition of 1 into k parts, each a positive multiple of 0.05."""
    if k == 1:
        return [Fraction(1)]
    cuts = sorted(rng.sample(range(1, 20), k - 1))
    bounds = [0, *cuts, 20]
    return [Fraction(b - a, 20) for a, b in zip(bounds, bounds[1:])]


def _build_once(rng: random.Random, params: GeneratorParams) -> Scenario:
    n = params.n_actions
    n_sources = max(1, min(n - 1, round(n * 0.3)))
    middles = n - n_sources - 1
    m_layers = 0 if middles == 0 else 1 + min(2, middles // 4)

    layers: list[list[int]] = [[] for _ in range(m_layers + 2)]
    layers[0] = list(range(n_sources))
    for i in range(n_sources, n - 1):
        layers[rng.randint(1, m_layers)].append(i)
    layers[-1] = [n - 1]

    outcome_counts = [
        rng.randint(params.min_outcomes, params.max_outcomes) for _ in range(n)
    ]
    earlier: list[int] = []
    actions: list[ActionSpec] = []
    for layer_index, layer in enumerate(layers):
        for i in layer:
            prereq = PrereqExpr()
            if layer_index > 0:
                n_parents = 1
                if rng.random() < params.density:
                    n_parents += 1
                if rng.random() < params.density / 2:
                    n_parents += 1
                parents = rng.sample(earlier, min(n_parents, len(earlier)))
                pairs = frozenset(
                    (f"a{p + 1}", rng.randint(1, outcome_counts[p])) for p in parents
                )
                if rng.random() < 0.5:
                    prereq = PrereqExpr(and_set=pairs)
                else:
                    prereq = PrereqExpr(or_set=pairs)
            probs = _probabilities(rng, outcome_counts[i])
            actions.append(
                ActionSpec(
                    id=f"a{i + 1}",
                    cost=Fraction(1),
                    outcomes=tuple(
                        OutcomeSpec(outcome_id=j + 1, probability=p)
                        for j, p in enumerate(probs)
                    ),
                    prereq=prereq,
                )
            )
        earlier.extend(layer)

    terminal = n - 1
    reward_outcome = rng.randint(1, outcome_counts[terminal])
    actions.sort(key=lambda a: int(a.id[1:]))
    return Scenario(
        actions=tuple(actions),
        root_budget=Fraction(params.budget),
        reward_pairs=(((f"a{terminal + 1}", reward_outcome), Fraction(1)),),
    )


def generate_instance(params: GeneratorParams) -> Scenario:
    """Seeded random scenario with at least one affordable rewarding set."""
    rng = random.Random(params.seed)
    for _ in range(MAX_ATTEMPTS):
        scn = _build_once(rng, params)
        bundle = enumerate_rewarding_sets(scn)
        if bundle and min(rs.total_cost for rs in bundle) <= scn.root_budget:
            return scn
    raise ScenarioError(
        f"no viable instance after {MAX_ATTEMPTS} attempts (seed {params.seed})",
        field="seed",
    )
