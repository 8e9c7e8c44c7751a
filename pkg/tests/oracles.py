"""Independent brute-force oracles for the tests.

Everything here avoids the production solution paths: plans are
enumerated rather than generated by column generation, matrix games go
straight to scipy's linprog, and small equilibria are found by support
enumeration. Exponential on purpose; only use on small instances.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linprog

from teamgames.game import GameTree
from teamgames.sequence_form import SequenceForm


def reduced_plans(sf: SequenceForm, player: int, cap: int | None = None) -> list[dict[int, int]]:
    """All reduced pure plans of one player: an action for every infoset
    reachable under the player's own earlier choices."""
    sset = sf.sets[player]
    by_entry: dict[int, list[int]] = {}
    for h, q in sset.infoset_entry.items():
        by_entry.setdefault(q, []).append(h)

    def expand(infosets: list[int]) -> list[dict[int, int]]:
        plans = [{}]
        for h in infosets:
            ext = sset.infoset_extensions[h]
            new_plans = []
            for base in plans:
                for a, q in enumerate(ext):
                    sub = expand(by_entry.get(q, []))
                    for tail in sub:
                        plan = dict(base)
                        plan[h] = a
                        plan.update(tail)
                        new_plans.append(plan)
                        if cap is not None and len(new_plans) > cap:
                            raise OverflowError("reduced plan enumeration over cap")
            plans = new_plans
        return plans

    return expand(by_entry.get(0, []))


def play_leaf(game: GameTree, choices: dict[int, dict[int, int]]) -> int:
    """Leaf reached when every player follows the per-infoset choices."""
    x = 0
    while not game.is_leaf(x):
        p = int(game.player[x])
        a = choices[p][int(game.infoset[x])]
        x = game.children[x][a]
    return x


def terminal_key(game: GameTree, sf: SequenceForm, team_choices: dict[int, dict[int, int]]):
    """Canonical (adversary sequence, leaf) map of a joint team plan."""
    adv = game.adversary
    pairs = []
    stack = [0]
    while stack:
        x = stack.pop()
        if game.is_leaf(x):
            pairs.append((int(sf.node_seq[x, adv]), x))
            continue
        p = int(game.player[x])
        if p == adv:
            stack.extend(game.children[x])
        else:
            stack.append(game.children[x][team_choices[p][int(game.infoset[x])]])
    return tuple(sorted(pairs))


def matrix_maxmin_value(matrix: np.ndarray) -> float:
    """Zero-sum matrix game value (row maximizes) straight from linprog."""
    m, n = matrix.shape
    # variables: x (rows), v; maximize v s.t. M^T x >= v, sum x = 1
    c = np.zeros(m + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-matrix.T, np.ones((n, 1))])
    b_ub = np.zeros(n)
    a_eq = np.hstack([np.ones((1, m)), np.zeros((1, 1))])
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=[1.0],
        bounds=[(0, None)] * m + [(None, None)],
        method="highs",
    )
    assert res.status == 0, res.message
    return float(-res.fun)


def team_joint_plans(game: GameTree, sf: SequenceForm, cap: int = 200_000):
    """Joint reduced team plans, one representative per terminal map."""
    per_player = []
    for p in game.team:
        plans = reduced_plans(sf, p, cap=cap)
        per_player.append(plans)
        cap_left = cap
    total = 1
    for plans in per_player:
        total *= len(plans)
        if total > cap:
            raise OverflowError("joint plan enumeration over cap")
    seen = {}
    for combo in itertools.product(*per_player):
        choices = {p: c for p, c in zip(game.team, combo)}
        full = {}
        for p in game.team:
            filled = {h: 0 for h in sf.sets[p].infoset_extensions}
            filled.update(choices[p])
            full[p] = filled
        key = terminal_key(game, sf, full)
        if key not in seen:
            seen[key] = full
    return seen


def correlated_value_bruteforce(game: GameTree, sf: SequenceForm, cap: int = 200_000) -> float:
    """Reduced-normal-form correlated team value by full enumeration."""
    joint = team_joint_plans(game, sf, cap=cap)
    adv_plans = reduced_plans(sf, game.adversary, cap=cap)
    keys = list(joint)
    matrix = np.zeros((len(keys), len(adv_plans)))
    for i, key in enumerate(keys):
        for j, adv in enumerate(adv_plans):
            choices = dict(joint[key])
            full_adv = {h: 0 for h in sf.sets[game.adversary].infoset_extensions}
            full_adv.update(adv)
            choices[game.adversary] = full_adv
            leaf = play_leaf(game, choices)
            matrix[i, j] = game.payoff[leaf]
    return matrix_maxmin_value(matrix)


def maxmin_value_bruteforce(game: GameTree, sf: SequenceForm, maximizer: int, cap: int = 200_000) -> float:
    """Two-player maxmin value over pure reduced plans (mixed by LP)."""
    minimizer = [p for p in range(game.num_players) if p != maximizer and game.infosets(p)]
    assert len(minimizer) <= 1
    max_plans = reduced_plans(sf, maximizer, cap=cap)
    min_plans = reduced_plans(sf, minimizer[0], cap=cap) if minimizer else [{}]
    matrix = np.zeros((len(max_plans), len(min_plans)))
    for i, mx in enumerate(max_plans):
        for j, mn in enumerate(min_plans):
            choices = {
                maximizer: {**{h: 0 for h in sf.sets[maximizer].infoset_extensions}, **mx},
            }
            if minimizer:
                choices[minimizer[0]] = {
                    **{h: 0 for h in sf.sets[minimizer[0]].infoset_extensions},
                    **mn,
                }
            matrix[i, j] = game.payoff[play_leaf(game, choices)]
    return matrix_maxmin_value(matrix)


def team_br_bruteforce(game: GameTree, sf: SequenceForm, adv_probs: np.ndarray, cap: int = 200_000) -> float:
    """Exact team best-response value by joint plan enumeration."""
    best = -np.inf
    for key in team_joint_plans(game, sf, cap=cap):
        value = sum(float(game.payoff[leaf]) * float(adv_probs[q]) for q, leaf in key)
        best = max(best, value)
    return best


def support_enumeration_value(matrix: np.ndarray, tol: float = 1e-9) -> float:
    """Zero-sum value by support enumeration (row player maximizes)."""
    m, n = matrix.shape
    for k in range(1, min(m, n) + 1):
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                sub = matrix[np.ix_(rows, cols)]
                # x on rows equalizing the chosen columns, then y likewise
                a = np.zeros((k + 1, k + 1))
                a[:k, :k] = sub.T
                a[:k, k] = -1.0
                a[k, :k] = 1.0
                b = np.zeros(k + 1)
                b[k] = 1.0
                try:
                    solx = np.linalg.solve(a, b)
                except np.linalg.LinAlgError:
                    continue
                x, v = solx[:k], solx[k]
                a[:k, :k] = sub
                try:
                    soly = np.linalg.solve(a, b)
                except np.linalg.LinAlgError:
                    continue
                y, w = soly[:k], soly[k]
                if x.min() < -tol or y.min() < -tol or abs(v - w) > 1e-7:
                    continue
                full_x = np.zeros(m)
                full_x[list(rows)] = x
                full_y = np.zeros(n)
                full_y[list(cols)] = y
                if (matrix.T @ full_x).min() < v - 1e-7:
                    continue
                if (matrix @ full_y).max() > v + 1e-7:
                    continue
                return float(v)
    raise RuntimeError("no equilibrium support found")


def max_sat_bruteforce(num_vars: int, clauses) -> int:
    """Maximum simultaneously satisfiable clauses, by full enumeration."""
    best = 0
    for bits in range(2**num_vars):
        assign = {v + 1: bool(bits >> v & 1) for v in range(num_vars)}
        count = sum(1 for cl in clauses if any(assign[abs(l)] == (l > 0) for l in cl))
        best = max(best, count)
    return best
