"""States, actions, scenarios, and the primitive operations on them.

A state is a tuple of small non-negative integers, one entry per action:
0 means the action has not been taken, k >= 1 means it was taken and
resolved to outcome k. The root state is all zeros. Rewards are kept as
exact fractions and normalized by the largest raw reward so that every
score downstream lies in [0, 1]; raw values are restored on output.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import OutOfDomainError, ScenarioError

State = tuple[int, ...]

# Entries are stored in byte-string keys, so outcome ids are capped.
MAX_OUTCOME_ID = 255

# Absolute tolerance for probability sums and score comparisons.
TOL = 1e-9

Pair = tuple[str, int]


@dataclass(frozen=True)
class OutcomeSpec:
    """One possible result of taking an action."""

    outcome_id: int
    probability: Fraction


@dataclass(frozen=True)
class PrereqExpr:
    """Gate over (action_id, outcome_id) pairs.

    and_set: every pair must hold; or_set: at least one must hold (when
    non-empty); notand_set: none may hold; notor_set: at least one must
    not hold (when non-empty). A pair (a, j) holds at s when s[a] = j.
    Empty everywhere means unconditionally available, budget permitting.
    """

    and_set: frozenset[Pair] = frozenset()
    or_set: frozenset[Pair] = frozenset()
    notand_set: frozenset[Pair] = frozenset()
    notor_set: frozenset[Pair] = frozenset()

    def is_empty(self) -> bool:
        return not (self.and_set or self.or_set or self.notand_set or self.notor_set)


@dataclass(frozen=True)
class ActionSpec:
    id: str
    cost: Fraction
    outcomes: tuple[OutcomeSpec, ...]
    prereq: PrereqExpr = PrereqExpr()
    repeatable: bool = False


@dataclass(frozen=True)
class StateDomain:
    """Per-dimension attainable values, each sorted ascending."""

    dims: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.dims)

    def contains(self, s: State) -> bool:
        return len(s) == len(self.dims) and all(
            x in vals for x, vals in zip(s, self.dims)
        )

    def size(self) -> int:
        n = 1
        for vals in self.dims:
            n *= len(vals)
        return n


@dataclass(frozen=True, eq=False)
class Scenario:
    """Action catalog, dependency gates, rewards, and the root budget."""

    actions: tuple[ActionSpec, ...]
    root_budget: Fraction
    reward_pairs: tuple[tuple[Pair, Fraction], ...]
    reward_scale: Fraction = field(init=False)
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        _validate_scenario(self)
        object.__setattr__(self, "reward_scale", max(v for _, v in self.reward_pairs))
        object.__setattr__(self, "index", {a.id: i for i, a in enumerate(self.actions)})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scenario):
            return NotImplemented
        return (
            self.actions == other.actions
            and self.root_budget == other.root_budget
            and sorted(self.reward_pairs) == sorted(other.reward_pairs)
        )

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    def action(self, action_id: str) -> ActionSpec:
        return self.actions[self.index[action_id]]

    def pairs(self) -> list[Pair]:
        """All (action_id, outcome_id) pairs of the scenario."""
        return [(a.id, o.outcome_id) for a in self.actions for o in a.outcomes]


def _validate_scenario(scn: Scenario) -> None:
    if not scn.actions:
        raise ScenarioError("scenario has no actions", field="actions")
    pair_table = {(a.id, o.outcome_id) for a in scn.actions for o in a.outcomes}
    seen = set()
    for a in scn.actions:
        if a.id in seen:
            raise ScenarioError(f"duplicate action id {a.id!r}", field="actions")
        seen.add(a.id)
        if a.cost < 0:
            raise ScenarioError(f"action {a.id!r} has negative cost", field="actions")
        if not a.outcomes:
            raise ScenarioError(f"action {a.id!r} has no outcomes", field="actions")
        oids = [o.outcome_id for o in a.outcomes]
        if len(set(oids)) != len(oids):
            raise ScenarioError(f"action {a.id!r} has duplicate outcome ids", field="actions")
        for o in a.outcomes:
            if not 1 <= o.outcome_id <= MAX_OUTCOME_ID:
                raise ScenarioError(
                    f"action {a.id!r} outcome id {o.outcome_id} outside 1..{MAX_OUTCOME_ID}",
                    field="actions",
                )
            if not 0 < o.probability <= 1:
                raise ScenarioError(
                    f"action {a.id!r} outcome {o.outcome_id} probability outside (0, 1]",
                    field="actions",
                )
        total = sum(o.probability for o in a.outcomes)
        if abs(total - 1) > TOL:
            raise ScenarioError(
                f"action {a.id!r} outcome probabilities sum to {float(total)}, not 1",
                field="actions",
            )
        for group in (a.prereq.and_set, a.prereq.or_set, a.prereq.notand_set, a.prereq.notor_set):
            for pair in group:
                if pair not in pair_table:
                    raise ScenarioError(
                        f"action {a.id!r} prerequisite references unknown pair {pair}",
                        field="actions",
                    )
    if scn.root_budget < 0:
        raise ScenarioError("root budget is negative", field="budget")
    if not scn.reward_pairs:
        raise ScenarioError("scenario has no rewards", field="rewards")
    seen_pairs = set()
    for pair, value in scn.reward_pairs:
        if pair not in pair_table:
            raise ScenarioError(f"reward references unknown pair {pair}", field="rewards")
        if pair in seen_pairs:
            raise ScenarioError(f"duplicate reward pair {pair}", field="rewards")
        seen_pairs.add(pair)
        if value <= 0:
            raise ScenarioError(f"reward value for {pair} is not positive", field="rewards")


def state_domain(scn: Scenario) -> StateDomain:
    """Default encoding: dimension i holds 0 or one of action i's outcome ids."""
    return StateDomain(
        tuple(tuple(sorted({0, *(o.outcome_id for o in a.outcomes)})) for a in scn.actions)
    )


def root_state(scn: Scenario) -> State:
    return (0,) * scn.n_actions


def outcome_delta(scn: Scenario, action_id: str, outcome_id: int) -> State:
    """Transition vector of one action outcome under the default encoding."""
    delta = [0] * scn.n_actions
    delta[scn.index[action_id]] = outcome_id
    return tuple(delta)


def apply_outcome(s: State, delta: State, dom: StateDomain) -> State:
    """Entry-wise s + delta, checked against the attainable domain."""
    out = tuple(x + d for x, d in zip(s, delta))
    for i, (x, vals) in enumerate(zip(out, dom.dims)):
        if x not in vals:
            raise OutOfDomainError(
                f"entry {x} at dimension {i} is outside its domain {vals}", dimension=i
            )
    return out


def remaining_budget(scn: Scenario, s: State) -> Fraction:
    spent = sum(
        (a.cost for a, x in zip(scn.actions, s) if x != 0),
        Fraction(0),
    )
    return scn.root_budget - spent


def reward_raw(scn: Scenario, s: State) -> Fraction:
    """Largest raw reward among the achieved reward pairs, 0 if none."""
    best = Fraction(0)
    for (aid, oid), value in scn.reward_pairs:
        if s[scn.index[aid]] == oid and value > best:
            best = value
    return best


def reward(scn: Scenario, s: State) -> Fraction:
    """reward_raw normalized by the scenario's reward scale."""
    return reward_raw(scn, s) / scn.reward_scale


def _pair_holds(scn: Scenario, s: State, pair: Pair) -> bool:
    return s[scn.index[pair[0]]] == pair[1]


def prereq_satisfied(scn: Scenario, s: State, prereq: PrereqExpr) -> bool:
    if not all(_pair_holds(scn, s, p) for p in prereq.and_set):
        return False
    if prereq.or_set and not any(_pair_holds(scn, s, p) for p in prereq.or_set):
        return False
    if any(_pair_holds(scn, s, p) for p in prereq.notand_set):
        return False
    if prereq.notor_set and all(_pair_holds(scn, s, p) for p in prereq.notor_set):
        return False
    return True


def available_actions(scn: Scenario, s: State) -> list[str]:
    """R(s): untaken actions whose gates pass and whose cost fits the budget.

    The default state encoding cannot record repetition, so every action
    (repeatable or not) is available only while its entry is 0. Returned
    in catalog order for determinism.
    """
    budget = remaining_budget(scn, s)
    out = []
    for i, a in enumerate(scn.actions):
        if s[i] != 0 or a.cost > budget:
            continue
        if prereq_satisfied(scn, s, a.prereq):
            out.append(a.id)
    return out


def state_key(s: State) -> bytes:
    """Canonical dictionary key for a state (entries as raw bytes)."""
    return bytes(s)


def key_to_state(key: bytes) -> State:
    return tuple(key)


def state_text(s: State) -> str:
    return ",".join(str(x) for x in s)


def parse_state_text(text: str, n: int | None = None) -> State:
    try:
        s = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise ScenarioError(f"bad state text {text!r}: {exc}", field="state") from None
    if any(x < 0 or x > MAX_OUTCOME_ID for x in s):
        raise ScenarioError(f"state entries outside 0..{MAX_OUTCOME_ID}", field="state")
    if n is not None and len(s) != n:
        raise ScenarioError(f"state has {len(s)} entries, expected {n}", field="state")
    return s


def state_index(dom: StateDomain, s: State) -> int:
    """Mixed-radix index of a state within its domain.

    Each dimension contributes (number of domain values <= entry) times
    the product of the sizes of the earlier dimensions. The mapping is
    injective over the domain but not zero-based: the all-zeros state of
    {0..9}^5 maps to 11111, the all-nines state to 111110.
    """
    if len(s) != len(dom.dims):
        raise OutOfDomainError(
            f"state has {len(s)} entries, domain has {len(dom.dims)}", dimension=len(dom.dims)
        )
    total = 0
    radix = 1
    for i, (x, vals) in enumerate(zip(s, dom.dims)):
        rank = bisect_right(vals, x)
        if rank == 0 or vals[rank - 1] != x:
            raise OutOfDomainError(
                f"entry {x} at dimension {i} is outside its domain {vals}", dimension=i
            )
        total += rank * radix
        radix *= len(vals)
    return total
