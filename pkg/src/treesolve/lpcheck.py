"""Linear-program cross-validation of the dynamic-programming scores.

The score LP minimizes the sum of all state scores subject to, per
non-leaf state and per surviving action, the action's expected child
score being a lower bound, with leaf scores fixed to their rewards and
all variables in [0, 1]. Over an acyclic graph the optimum is unique and
equals the DP fixpoint, so the solved values and the set of zero-slack
actions validate the scores and the reduced graph independently.

Two backends: "topological" (exact single pass, the default) and "highs"
(scipy's generic LP solver, the pluggable-external-solver route).
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import Scenario, state_text
from .errors import InternalCheckError
from .graph import StateGraph, _tables, topological_keys

SLACK_TOL = 1e-7

BACKENDS = ("topological", "highs")


@dataclass(frozen=True)
class LPRow:
    """One inequality: sum of p * child score <= state score."""

    key: bytes
    action_id: str
    terms: tuple[tuple[float, bytes], ...]


@dataclass(frozen=True)
class ScoreLP:
    variables: tuple[bytes, ...]  # topological order, parents first
    leaf_values: dict[bytes, float]
    rows: tuple[LPRow, ...]


@dataclass(frozen=True)
class LPSolution:
    lp: ScoreLP
    values: dict[bytes, float]
    objective: float


def build_score_lp(g: StateGraph, scn: Scenario) -> ScoreLP:
    t = _tables(scn)
    variables = tuple(topological_keys(g))
    leaf_values: dict[bytes, float] = {}
    rows: list[LPRow] = []
    for key in variables:
        rec = g.nodes[key]
        if not rec.pruned_actions:
            leaf_values[key] = float(t.reward_norm(rec.state))
            continue
        for aid in rec.pruned_actions:
            probs = t.prob_float[scn.index[aid]]
            rows.append(
                LPRow(
                    key=key,
                    action_id=aid,
                    terms=tuple((probs[oid], ckey) for oid, ckey in rec.children[aid]),
                )
            )
    return ScoreLP(variables=variables, leaf_values=leaf_values, rows=tuple(rows))


def solve_score_lp(lp: ScoreLP, backend: str = "topological") -> LPSolution:
    if backend not in BACKENDS:
        raise ValueError(f"unknown LP backend {backend!r}")
    if backend == "topological":
        values = _solve_topological(lp)
    else:
        values = _solve_highs(lp)
    return LPSolution(lp=lp, values=values, objective=sum(values.values()))


def _solve_topological(lp: ScoreLP) -> dict[bytes, float]:
    """Exact optimum: each variable is the max of its active lower bounds."""
    by_state: dict[bytes, list[LPRow]] = {}
    for row in lp.rows:
        by_state.setdefault(row.key, []).append(row)
    values: dict[bytes, float] = {}
    for key in reversed(lp.variables):
        if key in lp.leaf_values:
            values[key] = lp.leaf_values[key]
            continue
        best = 0.0
        for row in by_state.get(key, ()):
            total = sum(p * values[ckey] for p, ckey in row.terms)
            if total > best:
                best = total
        values[key] = min(best, 1.0)
    return values


def _solve_highs(lp: ScoreLP) -> dict[bytes, float]:
    import numpy as np
    from scipy.optimize import linprog
    from scipy.sparse import coo_matrix

    pos = {key: i for i, key in enumerate(lp.variables)}
    n = len(lp.variables)
    data, ri, ci = [], [], []
    for r, row in enumerate(lp.rows):
        for p, ckey in row.terms:
            data.append(p)
            ri.append(r)
            ci.append(pos[ckey])
        data.append(-1.0)
        ri.append(r)
        ci.append(pos[row.key])
    a_ub = coo_matrix((data, (ri, ci)), shape=(max(len(lp.rows), 1), n))
    b_ub = np.zeros(max(len(lp.rows), 1))
    eq_rows = list(lp.leaf_values.items())
    a_eq = coo_matrix(
        (
            np.ones(len(eq_rows)),
            (range(len(eq_rows)), [pos[k] for k, _ in eq_rows]),
        ),
        shape=(len(eq_rows), n),
    )
    b_eq = np.array([v for _, v in eq_rows])
    res = linprog(
        c=np.ones(n),
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=(0.0, 1.0),
        method="highs",
    )
    if not res.success:
        raise InternalCheckError(f"score LP did not solve: {res.message}")
    return {key: float(res.x[pos[key]]) for key in lp.variables}


def tight_actions(sol: LPSolution, g: StateGraph) -> dict[bytes, tuple[str, ...]]:
    """Per state, the actions whose LP constraint has (near) zero slack."""
    out: dict[bytes, list[str]] = {key: [] for key in sol.lp.variables}
    for row in sol.lp.rows:
        bound = sum(p * sol.values[ckey] for p, ckey in row.terms)
        if sol.values[row.key] - bound <= SLACK_TOL:
            out[row.key].append(row.action_id)
    return {key: tuple(aids) for key, aids in out.items()}


@dataclass(frozen=True)
class LPCheckReport:
    max_score_diff: float
    mismatched_states: tuple[bytes, ...]
    objective: float
    dp_total: float

    @property
    def ok(self) -> bool:
        return self.max_score_diff <= SLACK_TOL and not self.mismatched_states


def check_against_dp(g: StateGraph, scn: Scenario, backend: str = "topological") -> LPCheckReport:
    """Solve the LP and compare values and tight sets to the DP results."""
    from .graph import best_actions_at

    sol = solve_score_lp(build_score_lp(g, scn), backend=backend)
    max_diff = 0.0
    for key, rec in g.nodes.items():
        if rec.score is None:
            raise InternalCheckError("LP check requires a scored graph")
        max_diff = max(max_diff, abs(rec.score - sol.values[key]))
    tight = tight_actions(sol, g)
    mismatched = tuple(
        key
        for key in g.nodes
        if set(tight[key]) != set(best_actions_at(g, key, scn))
    )
    dp_total = sum(rec.score for rec in g.nodes.values())
    return LPCheckReport(
        max_score_diff=max_diff,
        mismatched_states=mismatched,
        objective=sol.objective,
        dp_total=dp_total,
    )


def export_lp_text(lp: ScoreLP) -> str:
    """Constraint-per-line LP interchange text (CPLEX LP style)."""

    def var(key: bytes) -> str:
        return "s_" + state_text(tuple(key)).replace(",", "_")

    lines = ["Minimize", " obj: " + " + ".join(var(k) for k in lp.variables), "Subject To"]
    for i, row in enumerate(lp.rows):
        terms = " + ".join(f"{p:.17g} {var(ckey)}" for p, ckey in row.terms)
        lines.append(f" c{i}_{row.action_id}: {terms} - {var(row.key)} <= 0")
    for i, (key, value) in enumerate(lp.leaf_values.items()):
        lines.append(f" e{i}: {var(key)} = {value:.17g}")
    lines.append("Bounds")
    for key in lp.variables:
        lines.append(f" 0 <= {var(key)} <= 1")
    lines.append("End")
    return "\n".join(lines) + "\n"
