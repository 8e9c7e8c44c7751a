"""Team maxmin without any device.

Teammates must mix independently, which makes the problem nonconvex
(products of realization plans). The production path is a certified
multistart local search:

  * alternating sweeps: fix all teammates but one, fold their
    probabilities into the payoff coefficients and solve that player's
    exact sequence-form maxmin LP; repeat until the value stalls;
  * a seeded simultaneous polish: coordinate sweeps alone stall on value
    ridges where only a *joint* move of several teammates helps (the
    matching families show this), so random multiplicative perturbations
    of all behavioral parameters at once, accepted only on certified
    improvement with a shrinking step, climb the ridge;
  * every reported value is certified by an exact adversary best
    response, so it is a feasible lower bound, flagged ``local``.

A grid-enumeration oracle over the team's behavioral simplex gives small
instances a global value up to a stated resolution bound; with a single
teammate both paths collapse to one exact LP flagged ``global``.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .evaluation import Behavior, best_response, leaf_reach, uniform_behavior
from .game import GameTree
from .sequence_form import (
    RealizationPlan,
    SequenceForm,
    behavioral_to_realization,
    build_sequence_form,
    realization_to_behavioral,
)
from .zerosum import payoff_coo, solve_maxmin

CONVERGENCE_TOL = 1e-8
MAX_SWEEPS = 200


@dataclass
class TMESolution:
    value: float
    #: per-teammate realization plans (team order)
    plans: dict[int, RealizationPlan]
    adversary_plan: RealizationPlan
    restarts: int
    status: str  # global | local | grid
    #: additive bound on the distance to the optimum (grid oracle only)
    gap: float = 0.0
    seconds: float = 0.0
    behavior: Behavior = field(default_factory=dict)


def _team_behavior_params(game: GameTree):
    """(player, infoset, action count) for every team infoset."""
    out = []
    for p in game.team:
        for h, nodes in game.infosets(p).items():
            out.append((p, h, len(game.labels[nodes[0]])))
    return out


def _certify(game: GameTree, behavior: Behavior) -> tuple[float, dict[int, int]]:
    """Exact worst case of the team's behavior (adversary best response)."""
    return best_response(game, behavior, game.adversary, minimize=True)


def _teammate_lp(
    game: GameTree, sf: SequenceForm, behavior: Behavior, player: int
) -> tuple[float, np.ndarray]:
    """Exact maxmin LP for one teammate, the rest of the team held fixed."""
    others = [p for p in game.team if p != player]
    weights = leaf_reach(game, behavior, others)
    adv = game.adversary
    entries: dict[tuple[int, int], float] = {}
    for k, leaf in enumerate(game.leaves):
        w = float(weights[k]) * float(game.payoff[leaf])
        if w == 0.0:
            continue
        key = (int(sf.node_seq[leaf, player]), int(sf.node_seq[leaf, adv]))
        entries[key] = entries.get(key, 0.0) + w
    payoff = payoff_coo(entries, (sf.sets[player].size, sf.sets[adv].size))
    sol = solve_maxmin(payoff, sf.systems[player], sf.systems[adv])
    return sol.value, sol.max_plan


def _alternating_sweeps(
    game: GameTree, sf: SequenceForm, behavior: Behavior
) -> tuple[float, Behavior]:
    value = -np.inf
    for _ in range(MAX_SWEEPS):
        improved = False
        for p in game.team:
            if not game.infosets(p):
                continue
            new_value, plan = _teammate_lp(game, sf, behavior, p)
            behavior[p] = realization_to_behavioral(sf, p, plan)
            if new_value > value + CONVERGENCE_TOL:
                improved = True
            value = max(value, new_value)
        if not improved:
            break
    return value, behavior


def _polish(
    game: GameTree,
    behavior: Behavior,
    value: float,
    rng: np.random.Generator,
    budget: int,
) -> tuple[float, Behavior]:
    """Simultaneous multiplicative perturbations, certified hill climbing."""
    params = [(p, h, k) for (p, h, k) in _team_behavior_params(game) if k > 1]
    if not params:
        return value, behavior
    step = 0.5
    stale = 0
    for _ in range(budget):
        trial = {p: dict(dists) for p, dists in behavior.items()}
        for p, h, k in params:
            bump = np.exp(rng.normal(0.0, step, size=k))
            dist = np.maximum(behavior[p][h], 1e-12) * bump
            trial[p][h] = dist / dist.sum()
        trial_value, _ = _certify(game, trial)
        if trial_value > value + 1e-12:
            behavior = trial
            value = trial_value
            stale = 0
        else:
            stale += 1
            if stale >= 20:
                step *= 0.5
                stale = 0
                if step < 1e-4:
                    break
    return value, behavior


def solve_tme_local(
    game: GameTree,
    restarts: int = 10,
    seed: int = 0,
    polish_budget: int = 400,
    time_limit: float | None = None,
) -> TMESolution:
    """Certified multistart local search for the no-device value.

    Behavioral strategies are initialized uniformly on each simplex
    (flat Dirichlet), then alternated, polished and re-alternated. The
    best restart wins, ties to the earlier one. The reported value is
    always achieved by the returned plans against an exact adversary
    best response.
    """
    start = time.perf_counter()
    sf = build_sequence_form(game)
    team = game.team

    if len(team) == 1:
        value, plan = _teammate_lp(game, sf, {team[0]: uniform_behavior(game, team[0])}, team[0])
        behavior = {team[0]: realization_to_behavioral(sf, team[0], plan)}
        return _finish(game, sf, behavior, value, 0, "global", start)

    rng = np.random.default_rng(seed)
    best_value = -np.inf
    best_behavior: Behavior | None = None
    used = 0
    for _ in range(max(1, restarts)):
        if time_limit is not None and used > 0 and time.perf_counter() - start > time_limit:
            break
        used += 1
        behavior: Behavior = {}
        for p in team:
            behavior[p] = {
                h: rng.dirichlet(np.ones(len(game.labels[nodes[0]])))
                for h, nodes in game.infosets(p).items()
            }
        value, behavior = _alternating_sweeps(game, sf, behavior)
        value, behavior = _polish(game, behavior, value, rng, polish_budget)
        value, behavior = _alternating_sweeps(game, sf, behavior)
        if value > best_value + 1e-15:
            best_value = value
            best_behavior = behavior
    return _finish(game, sf, best_behavior, best_value, used, "local", start)


def _finish(game, sf, behavior, value, restarts, status, start) -> TMESolution:
    certified, adv_choice = _certify(game, behavior)
    plans = {p: behavioral_to_realization(sf, p, behavior[p]) for p in game.team}
    adv_behavior = {}
    for h, nodes in game.infosets(game.adversary).items():
        dist = np.zeros(len(game.labels[nodes[0]]))
        dist[adv_choice[h]] = 1.0
        adv_behavior[h] = dist
    adv_plan = behavioral_to_realization(sf, game.adversary, adv_behavior)
    return TMESolution(
        value=float(certified),
        plans=plans,
        adversary_plan=adv_plan,
        restarts=restarts,
        status=status,
        seconds=time.perf_counter() - start,
        behavior=behavior,
    )


def solve_tme_exact_small(
    game: GameTree,
    resolution: float = 0.05,
    max_points: int = 2_000_000,
) -> TMESolution:
    """Grid enumeration of the team's behavioral space.

    Guarded: at most 8 free behavioral parameters, and the implied grid
    size must stay below ``max_points``. The returned gap bounds the
    distance to the true optimum: resolution * parameters * max |payoff|.
    With one teammate the exact LP is used instead (gap 0).
    """
    start = time.perf_counter()
    sf = build_sequence_form(game)
    team = game.team
    if len(team) == 1:
        value, plan = _teammate_lp(game, sf, {team[0]: uniform_behavior(game, team[0])}, team[0])
        behavior = {team[0]: realization_to_behavioral(sf, team[0], plan)}
        return _finish(game, sf, behavior, value, 0, "global", start)

    params = _team_behavior_params(game)
    free = sum(k - 1 for _, _, k in params)
    if free > 8:
        raise ValueError(f"{free} behavioral parameters exceed the guard of 8")
    steps = max(1, round(1.0 / resolution))
    grids = []
    for _, _, k in params:
        points = [
            np.array(c, dtype=float) / steps
            for c in _compositions(steps, k)
        ]
        grids.append(points)
    total = math.prod(len(g) for g in grids)
    if total > max_points:
        raise ValueError(f"grid of {total} points exceeds the cap of {max_points}")

    best_value = -np.inf
    best_behavior: Behavior | None = None
    for combo in itertools.product(*grids):
        behavior: Behavior = {p: {} for p in team}
        for (p, h, _), dist in zip(params, combo):
            behavior[p][h] = dist
        value, _ = _certify(game, behavior)
        if value > best_value:
            best_value = value
            best_behavior = behavior
    sol = _finish(game, sf, best_behavior, best_value, 0, "grid", start)
    sol.gap = resolution * free * float(np.max(np.abs(game.payoff[game.leaves])))
    return sol


def _compositions(total: int, parts: int):
    """All nonnegative integer tuples of length ``parts`` summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest
