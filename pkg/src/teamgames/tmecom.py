"""Team maxmin with a communication device.

With preplay and intraplay communication the team behaves like a single
player who observes every teammate's move, so the equilibrium is the
plain sequence-form maxmin of the folded observable game: transform,
fold, one LP per side. Everything here is polynomial in the tree size.

The mediator's behaviour is recovered afterwards: at each refined team
infoset the recommendation is the folded player's behavioral action
distribution, conditioned on the ordered team history that identifies
the infoset.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .evaluation import Behavior, expected_team_value
from .game import GameTree
from .observable import FoldedGame, fold_team, force_t_observability
from .sequence_form import (
    RealizationPlan,
    SequenceForm,
    build_sequence_form,
    realization_to_behavioral,
)
from .zerosum import ZeroSumSolution, payoff_coo, solve_maxmin

TEAM, ADV = 0, 1


@dataclass
class Recommendation:
    """Mediator rule for one refined infoset: given the owner, the
    original infoset and the reported team history, play ``dist`` over
    the infoset's actions. ``reached`` is False when the equilibrium
    never visits the infoset (the uniform fill is arbitrary there)."""

    player: int
    original_infoset: int
    team_moves: tuple[tuple[int, int, int], ...]
    dist: np.ndarray
    reached: bool


@dataclass
class TMEComSolution:
    value: float
    team_plan: RealizationPlan
    adversary_plan: RealizationPlan
    folded: FoldedGame
    seq_form: SequenceForm
    lp: ZeroSumSolution
    seconds: float


def solve_tmecom(game: GameTree) -> TMEComSolution:
    """Equilibrium value and plans with a communication device."""
    start = time.perf_counter()
    folded = fold_team(force_t_observability(game))
    sf = build_sequence_form(folded.game)
    entries: dict[tuple[int, int], float] = {}
    for k in range(len(sf.terminal.leaves)):
        key = (int(sf.terminal.profiles[k, TEAM]), int(sf.terminal.profiles[k, ADV]))
        entries[key] = entries.get(key, 0.0) + float(sf.terminal.values[k])
    payoff = payoff_coo(entries, (sf.sets[TEAM].size, sf.sets[ADV].size))
    sol = solve_maxmin(payoff, sf.systems[TEAM], sf.systems[ADV])
    return TMEComSolution(
        value=sol.value,
        team_plan=RealizationPlan(player=TEAM, probs=sol.max_plan),
        adversary_plan=RealizationPlan(player=ADV, probs=sol.min_plan),
        folded=folded,
        seq_form=sf,
        lp=sol,
        seconds=time.perf_counter() - start,
    )


def extract_recommendations(sol: TMEComSolution) -> list[Recommendation]:
    """Per-infoset mediator rules, realization-equivalent to the team plan."""
    behavior = realization_to_behavioral(sol.seq_form, TEAM, sol.team_plan.probs)
    sset = sol.seq_form.sets[TEAM]
    recs = []
    for h, dist in behavior.items():
        entry = sset.infoset_entry[h]
        reached = bool(sol.team_plan.probs[entry] > 1e-9)
        orig_player, obs_infoset = sol.folded.infoset_origin[h]
        moves, orig_infoset = sol.folded.source.provenance[(orig_player, obs_infoset)]
        recs.append(
            Recommendation(
                player=orig_player,
                original_infoset=orig_infoset,
                team_moves=moves,
                dist=dist,
                reached=reached,
            )
        )
    return recs


def replay_value(game: GameTree, sol: TMEComSolution) -> float:
    """Expected team utility when teammates follow the recommendations
    and the adversary plays her equilibrium plan, evaluated on the
    original tree. Reproduces the LP value; used as a certificate."""
    recs = {
        (r.player, r.original_infoset, r.team_moves): r.dist
        for r in extract_recommendations(sol)
    }
    adv_behavior = realization_to_behavioral(
        sol.seq_form, ADV, sol.adversary_plan.probs
    )
    adv_map = sol.folded.adversary_infoset_map
    team = set(game.team)

    total = 0.0
    stack: list[tuple[int, float, tuple]] = [(0, 1.0, ())]
    while stack:
        x, prob, moves = stack.pop()
        if prob == 0.0:
            continue
        if game.is_leaf(x):
            total += prob * float(game.payoff[x])
            continue
        p = int(game.player[x])
        h = int(game.infoset[x])
        if p in team:
            dist = recs[(p, h, moves)]
            for a, child in enumerate(game.children[x]):
                stack.append((child, prob * float(dist[a]), moves + ((p, h, a),)))
        else:
            dist = adv_behavior[adv_map[h]]
            for a, child in enumerate(game.children[x]):
                stack.append((child, prob * float(dist[a]), moves))
    return total


def folded_behavior(sol: TMEComSolution) -> Behavior:
    """Both folded players' behavioral strategies (for best-response checks)."""
    return {
        TEAM: realization_to_behavioral(sol.seq_form, TEAM, sol.team_plan.probs),
        ADV: realization_to_behavioral(sol.seq_form, ADV, sol.adversary_plan.probs),
    }


def folded_expected_value(sol: TMEComSolution) -> float:
    return expected_team_value(sol.folded.game, folded_behavior(sol))
