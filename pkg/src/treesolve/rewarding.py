"""Rewarding sets: enumeration, dominance filtering, propagation, pruning.

A rewarding set is a minimal selection of (action, outcome) pairs that
realizes a reward while satisfying every AND/OR/NOTAND/NOTOR gate of the
selected actions. Sets are enumerated by a depth-first branch-and-bound
over the selection variables, minimizing cardinality and re-solving with
a no-good cut per solution until infeasible. Each set carries the reward
of its implied target state and the total cost of its member actions.

Enumeration optionally starts from a mid-mission state: pairs of actions
already taken are no longer selectable, and gate members already realized
count as realized.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import Pair, Scenario, State, remaining_budget, reward, root_state
from .errors import InternalCheckError


@dataclass(frozen=True)
class RewardingSet:
    """Minimal action-outcome selection reaching one reward state."""

    pairs: frozenset[Pair]
    target_reward: Fraction
    total_cost: Fraction
    actions: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.pairs:
            raise InternalCheckError("empty rewarding set")
        object.__setattr__(self, "actions", frozenset(a for a, _ in self.pairs))


@dataclass(frozen=True)
class RewardingSetBundle:
    """The rewarding sets still alive at some state."""

    sets: tuple[RewardingSet, ...] = ()

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def as_pair_sets(self) -> set[frozenset[Pair]]:
        return {rs.pairs for rs in self.sets}


class _Selection:
    """Constraint tables for the binary selection program, index space."""

    def __init__(self, scn: Scenario, root: State):
        self.scn = scn
        self.omega: list[Pair] = [
            (a.id, o.outcome_id)
            for a in scn.actions
            if root[scn.index[a.id]] == 0
            for o in a.outcomes
        ]
        self.pos = {pair: i for i, pair in enumerate(self.omega)}
        m = len(self.omega)
        self.sinks = frozenset(
            self.pos[pair] for pair, _ in scn.reward_pairs if pair in self.pos
        )
        self.and_req: list[tuple[int, ...]] = [()] * m
        self.or_req: list[tuple[int, ...] | None] = [None] * m
        self.notand_block: list[tuple[int, ...]] = [()] * m
        self.notor_req: list[tuple[int, ...] | None] = [None] * m
        self.dead: set[int] = set()

        def realized(pair: Pair) -> bool:
            return root[scn.index[pair[0]]] == pair[1]

        def unrealizable(pair: Pair) -> bool:
            entry = root[scn.index[pair[0]]]
            return entry != 0 and entry != pair[1]

        for i, (aid, _) in enumerate(self.omega):
            pr = scn.action(aid).prereq
            needed = []
            for p in sorted(pr.and_set):
                if realized(p):
                    continue
                if unrealizable(p):
                    self.dead.add(i)
                    break
                needed.append(self.pos[p])
            else:
                self.and_req[i] = tuple(needed)
            if pr.or_set and not any(realized(p) for p in pr.or_set):
                open_members = tuple(
                    sorted(self.pos[p] for p in pr.or_set if not unrealizable(p))
                )
                if open_members:
                    self.or_req[i] = open_members
                else:
                    self.dead.add(i)
            if any(realized(p) for p in pr.notand_set):
                self.dead.add(i)
            self.notand_block[i] = tuple(
                sorted(self.pos[p] for p in pr.notand_set if p in self.pos)
            )
            if pr.notor_set and not any(unrealizable(p) for p in pr.notor_set):
                open_members = tuple(
                    sorted(self.pos[p] for p in pr.notor_set if not realized(p))
                )
                if open_members:
                    self.notor_req[i] = open_members
                else:
                    self.dead.add(i)


def _min_cardinality(sel_ctx: _Selection, cuts: list[frozenset[int]]) -> frozenset[int] | None:
    """One branch-and-bound solve: smallest feasible selection avoiding cuts."""
    best: frozenset[int] | None = None

    def close(sel: set[int], forb: set[int]) -> bool:
        """Unit-propagate AND/NOTAND consequences; False on conflict."""
        queue = list(sel)
        while queue:
            i = queue.pop()
            if i in sel_ctx.dead or i in forb:
                return False
            for j in sel_ctx.and_req[i]:
                if j in forb:
                    return False
                if j not in sel:
                    sel.add(j)
                    queue.append(j)
            for j in sel_ctx.notand_block[i]:
                if j in sel:
                    return False
                forb.add(j)
        for i in sel:
            req = sel_ctx.notor_req[i]
            if req is not None and all(j in sel for j in req):
                return False
        return not any(cut <= sel for cut in cuts)

    def obligations(sel: set[int], forb: set[int]):
        """Unsatisfied at-least-one constraints, smallest candidate set first."""
        pending = []
        if not (sel_ctx.sinks & sel):
            pending.append(sel_ctx.sinks)
        for i in sel:
            req = sel_ctx.or_req[i]
            if req is not None and not any(j in sel for j in req):
                pending.append(frozenset(req))
        if not pending:
            return None
        best_ob = min(pending, key=lambda ob: len(ob - forb))
        return sorted(best_ob - forb)

    def branch(sel: set[int], forb: set[int]) -> None:
        nonlocal best
        if not close(sel, forb):
            return
        if best is not None and len(sel) >= len(best):
            return
        cands = obligations(sel, forb)
        if cands is None:
            best = frozenset(sel)
            return
        if not cands:
            return
        for k, c in enumerate(cands):
            branch(sel | {c}, forb | set(cands[:k]))

    branch(set(), set(sel_ctx.dead))
    return best


def _implied_reward(scn: Scenario, root: State, pairs: frozenset[Pair]) -> Fraction:
    entries = list(root)
    for aid, oid in pairs:
        entries[scn.index[aid]] += oid
    return reward(scn, tuple(entries))


def _make_set(scn: Scenario, root: State, pairs: frozenset[Pair]) -> RewardingSet:
    return RewardingSet(
        pairs=pairs,
        target_reward=_implied_reward(scn, root, pairs),
        total_cost=sum((scn.action(a).cost for a, _ in pairs), Fraction(0)),
    )


def enumerate_rewarding_sets(scn: Scenario, root: State | None = None) -> RewardingSetBundle:
    """All minimal feasible selections, via the cut loop.

    Re-solves the cardinality-minimizing program, excluding each solution
    with a no-good cut, until infeasible. The output is exactly the set of
    inclusion-minimal feasible selections, sorted by (size, pairs).
    """
    root = root if root is not None else root_state(scn)
    ctx = _Selection(scn, root)
    cuts: list[frozenset[int]] = []
    found: list[frozenset[int]] = []
    limit = 1 + (1 << min(len(ctx.omega), 40))
    while len(found) < limit:
        sol = _min_cardinality(ctx, cuts)
        if sol is None:
            break
        found.append(sol)
        cuts.append(sol)
    else:
        raise InternalCheckError("cut loop failed to terminate")

    def sort_key(indices: frozenset[int]):
        pairs = sorted((scn.index[ctx.omega[i][0]], ctx.omega[i][1]) for i in indices)
        return (len(indices), pairs)

    sets = tuple(
        _make_set(scn, root, frozenset(ctx.omega[i] for i in indices))
        for indices in sorted(found, key=sort_key)
    )
    return RewardingSetBundle(sets)


def filter_dominated(bundle: RewardingSetBundle, scn: Scenario) -> RewardingSetBundle:
    """Drop sets that are strict supersets of another with no greater reward."""
    kept = tuple(
        rs
        for rs in bundle
        if not any(
            other.pairs < rs.pairs and other.target_reward >= rs.target_reward
            for other in bundle
        )
    )
    return RewardingSetBundle(kept)


def propagate(
    parent_bundle: RewardingSetBundle,
    edge: Pair,
    child_state: State,
    scn: Scenario,
    child_budget: Fraction | None = None,
) -> RewardingSetBundle:
    """Rewarding sets a child inherits across one action-outcome edge.

    A parent set survives only while the child's reward is still below the
    set's target. If the edge pair is a member, it is removed (progress);
    if the edge action is a member with a different outcome, the set
    survives only for repeatable actions within budget; otherwise the set
    survives if the remaining budget covers the remaining member costs.
    """
    if child_budget is None:
        child_budget = remaining_budget(scn, child_state)
    child_reward = reward(scn, child_state)
    action_id, _ = edge
    repeatable = scn.action(action_id).repeatable
    out: list[RewardingSet] = []
    seen: set[tuple[frozenset[Pair], Fraction]] = set()

    def keep(pairs: frozenset[Pair], target: Fraction, cost: Fraction) -> None:
        key = (pairs, target)
        if key not in seen:
            seen.add(key)
            out.append(RewardingSet(pairs=pairs, target_reward=target, total_cost=cost))

    for rs in parent_bundle:
        if child_reward >= rs.target_reward:
            continue
        if edge in rs.pairs:
            keep(rs.pairs - {edge}, rs.target_reward, rs.total_cost - scn.action(action_id).cost)
        elif action_id in rs.actions:
            if repeatable and child_budget >= rs.total_cost:
                keep(rs.pairs, rs.target_reward, rs.total_cost)
        elif child_budget >= rs.total_cost:
            keep(rs.pairs, rs.target_reward, rs.total_cost)
    return RewardingSetBundle(tuple(out))


def prune_actions(avail, bundle: RewardingSetBundle, current_reward) -> list[str]:
    """Restrict available actions to members of still-improving sets."""
    alive: set[str] = set()
    for rs in bundle:
        if rs.target_reward > current_reward:
            alive |= rs.actions
    return [a for a in avail if a in alive]
