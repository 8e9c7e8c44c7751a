"""Direct tree evaluation of behavioral strategy profiles.

These helpers deliberately avoid the LP machinery so they can serve as
independent certificates: expected value by plain traversal, exact best
responses by dynamic programming over the responder's infosets, and
backward induction for perfect-information games.
"""

from __future__ import annotations

import numpy as np

from .game import GameTree, history_for

#: behavior[player][infoset] -> action probabilities
Behavior = dict[int, dict[int, np.ndarray]]


def uniform_behavior(game: GameTree, player: int) -> dict[int, np.ndarray]:
    return {
        h: np.full(len(game.labels[nodes[0]]), 1.0 / len(game.labels[nodes[0]]))
        for h, nodes in game.infosets(player).items()
    }


def expected_team_value(game: GameTree, behavior: Behavior) -> float:
    """Expected team utility when everyone plays ``behavior``."""
    total = 0.0
    stack = [(0, 1.0)]
    while stack:
        x, prob = stack.pop()
        if prob == 0.0:
            continue
        if game.is_leaf(x):
            total += prob * game.payoff[x]
            continue
        dist = behavior[int(game.player[x])][int(game.infoset[x])]
        for a, child in enumerate(game.children[x]):
            stack.append((child, prob * dist[a]))
    return total


def best_response(
    game: GameTree, behavior: Behavior, responder: int, minimize: bool = False
) -> tuple[float, dict[int, int]]:
    """Exact best response of ``responder`` against fixed opponents.

    Returns the responder's optimal value of the team utility (minimized
    when the responder is the adversary) together with a pure choice per
    infoset. Ties break toward the lowest action index. Requires perfect
    recall for the responder.
    """
    # reach probability contributed by the *other* players only
    reach = np.zeros(game.num_nodes)
    reach[0] = 1.0
    order = list(game.dfs())
    for x in order:
        if game.is_leaf(x) or reach[x] == 0.0:
            continue
        p = int(game.player[x])
        if p == responder:
            for child in game.children[x]:
                reach[child] = reach[x]
        else:
            dist = behavior[p][int(game.infoset[x])]
            for a, child in enumerate(game.children[x]):
                reach[child] = reach[x] * dist[a]

    infosets = game.infosets(responder)
    # deeper infosets (in the responder's own move count) are resolved first
    depth_of = {
        h: len(history_for(game, nodes[0], responder)) for h, nodes in infosets.items()
    }
    choice: dict[int, int] = {}
    cache: dict[int, float] = {}

    def value(x: int) -> float:
        if x in cache:
            return cache[x]
        if game.is_leaf(x):
            v = float(game.payoff[x])
        else:
            p = int(game.player[x])
            h = int(game.infoset[x])
            if p == responder:
                v = value(game.children[x][choice[h]])
            else:
                dist = behavior[p][h]
                v = sum(dist[a] * value(c) for a, c in enumerate(game.children[x]))
        cache[x] = v
        return v

    sign = -1.0 if minimize else 1.0
    for h in sorted(infosets, key=lambda h: -depth_of[h]):
        nodes = infosets[h]
        best_a, best_v = 0, -np.inf
        for a in range(len(game.children[nodes[0]])):
            v = sign * sum(reach[x] * value(game.children[x][a]) for x in nodes)
            if v > best_v + 1e-12:
                best_a, best_v = a, v
        choice[h] = best_a
        cache.clear()

    return value(0), choice


def pure_behavior(game: GameTree, player: int, choice: dict[int, int]) -> dict[int, np.ndarray]:
    """One-hot behavioral strategy from per-infoset action choices."""
    out = {}
    for h, nodes in game.infosets(player).items():
        k = len(game.labels[nodes[0]])
        dist = np.zeros(k)
        dist[choice[h]] = 1.0
        out[h] = dist
    return out


def backward_induction(game: GameTree) -> float:
    """Game value of a perfect-information game.

    Team nodes maximize, adversary nodes minimize. Raises ``ValueError``
    if any infoset contains more than one node.
    """
    for p in range(game.num_players):
        for h, nodes in game.infosets(p).items():
            if len(nodes) > 1:
                raise ValueError(f"player {p} infoset {h} is not a singleton")
    val = np.zeros(game.num_nodes)
    for x in reversed(list(game.dfs())):
        if game.is_leaf(x):
            val[x] = game.payoff[x]
        else:
            vals = [val[c] for c in game.children[x]]
            val[x] = min(vals) if game.player[x] == game.adversary else max(vals)
    return float(val[0])


def leaf_reach(game: GameTree, behavior: Behavior, players) -> np.ndarray:
    """Per-leaf probability contributed by ``players`` alone."""
    players = set(players)
    reach = np.zeros(game.num_nodes)
    reach[0] = 1.0
    for x in game.dfs():
        if game.is_leaf(x):
            continue
        p = int(game.player[x])
        if p in players:
            dist = behavior[p][int(game.infoset[x])]
            for a, child in enumerate(game.children[x]):
                reach[child] = reach[x] * dist[a]
        else:
            for child in game.children[x]:
                reach[child] = reach[x]
    return reach[game.leaves]
