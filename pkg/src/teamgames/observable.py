"""Making the team mutually observable, and folding it into one player.

With a mediator every teammate effectively knows the whole team's past
moves, so the team's information sets are refined: two team nodes stay
indistinguishable only if they were indistinguishable before *and* the
ordered list of team moves on their root paths is identical. Adversary
infosets are untouched. The refinement is computed by a single
depth-first traversal over nested hash tables keyed by the team move
list; fresh infoset ids are handed out per player in discovery order,
so the output is deterministic.

After the refinement the whole team can be folded into a single player:
because each new infoset pins down the exact ordered team history, the
folded player has perfect recall and the 2-player game can be solved in
sequence form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game import GameTree, TeamSpec, validate_perfect_recall


@dataclass
class ObservableGame:
    """Team-observable refinement of a game.

    ``provenance`` maps each (player, new infoset) to the pair (ordered
    team move list, original infoset) that defines it. Each move is a
    (player, original infoset, action index) triple.
    """

    game: GameTree
    provenance: dict[tuple[int, int], tuple[tuple[tuple[int, int, int], ...], int]]


class FoldTeamError(RuntimeError):
    """Folding produced an imperfect-recall team player (transform bug)."""


@dataclass
class FoldedGame:
    """Two-player view: player 0 owns every former team node, player 1 is
    the adversary. ``infoset_origin`` tracks where each folded team
    infoset came from."""

    game: GameTree
    infoset_origin: dict[int, tuple[int, int]]
    adversary_infoset_map: dict[int, int]
    source: ObservableGame


def force_t_observability(game: GameTree) -> ObservableGame:
    """Refine the team's information partition for full team observability.

    One DFS pass; the outer table is keyed by the ordered team move list
    on the path, the inner table by the original infoset. Worst case
    O(|V|^2) from the path-tuple hashing.
    """
    team = set(game.team)
    new_infoset = game.infoset.copy()
    next_id = {p: 0 for p in range(game.num_players)}
    table: dict[tuple, dict[tuple[int, int], int]] = {}
    provenance: dict[tuple[int, int], tuple[tuple, int]] = {}

    # DFS with an explicit stack carrying the team move list
    stack: list[tuple[int, tuple]] = [(0, ())]
    while stack:
        x, moves = stack.pop()
        if game.is_leaf(x):
            continue
        p = int(game.player[x])
        h = int(game.infoset[x])
        if p in team:
            inner = table.setdefault(moves, {})
            key = (p, h)
            if key not in inner:
                inner[key] = next_id[p]
                provenance[(p, next_id[p])] = (moves, h)
                next_id[p] += 1
            new_infoset[x] = inner[key]
        for a in range(len(game.children[x]) - 1, -1, -1):
            child = game.children[x][a]
            child_moves = moves + ((p, h, a),) if p in team else moves
            stack.append((child, child_moves))

    refined = game.replace_partition(infoset=new_infoset)
    return ObservableGame(game=refined, provenance=provenance)


def fold_team(obs: ObservableGame, team: TeamSpec | None = None) -> FoldedGame:
    """Merge all team members of an observable game into one player.

    The folded game has players {0: team, 1: adversary}; infoset ids are
    reassigned densely in discovery order on both sides. Perfect recall
    of the folded team player must hold by construction; a violation
    raises :class:`FoldTeamError`.
    """
    game = obs.game
    if team is None:
        team = TeamSpec.from_game(game)
    members = set(team.members)

    player = game.player.copy()
    infoset = game.infoset.copy()
    team_ids: dict[tuple[int, int], int] = {}
    adv_ids: dict[int, int] = {}
    for x in game.dfs():
        if game.is_leaf(x):
            continue
        p = int(game.player[x])
        h = int(game.infoset[x])
        if p in members:
            key = (p, h)
            if key not in team_ids:
                team_ids[key] = len(team_ids)
            player[x] = 0
            infoset[x] = team_ids[key]
        else:
            if h not in adv_ids:
                adv_ids[h] = len(adv_ids)
            player[x] = 1
            infoset[x] = adv_ids[h]

    folded = GameTree(
        num_players=2,
        adversary=1,
        parent=game.parent,
        parent_action=game.parent_action,
        player=player,
        infoset=infoset,
        payoff=game.payoff,
        children=game.children,
        labels=game.labels,
    )
    violations = validate_perfect_recall(folded)
    if violations:
        raise FoldTeamError(
            f"folded team player lost perfect recall: {violations[0]}"
        )
    origin = {new: key for key, new in team_ids.items()}
    return FoldedGame(
        game=folded,
        infoset_origin=origin,
        adversary_infoset_map=adv_ids,
        source=obs,
    )


def observable_to_dict(obs: ObservableGame) -> dict:
    """Game document plus an auxiliary provenance map (JSON-friendly)."""
    from .serialize import game_to_dict

    return {
        "game": game_to_dict(obs.game),
        "provenance": [
            {
                "player": p,
                "infoset": h,
                "team_moves": [list(m) for m in moves],
                "original_infoset": orig,
            }
            for (p, h), (moves, orig) in obs.provenance.items()
        ],
    }
