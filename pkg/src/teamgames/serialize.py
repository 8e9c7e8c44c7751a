"""Reading and writing the JSON game file format.

A game document looks like::

    {"players": 3, "adversary": 2, "root": <node>}

where a node is either a leaf ``{"leaf": {"team_utility": 0.5}}`` or a
decision ``{"player": 0, "infoset": 1, "actions": [{"label": "l",
"child": <node>}, ...]}``. Player ids are 0-based; infoset ids are scoped
per player. Loading validates the schema, the tree structure and perfect
recall; every schema error carries the path of the offending element.
"""

from __future__ import annotations

import json

import numpy as np

from .game import LEAF, GameError, GameTree, RecallError, validate_perfect_recall


class SchemaError(GameError):
    """The document does not match the game file schema."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def game_from_dict(doc: dict) -> GameTree:
    """Build and fully validate a game from a parsed document."""
    if not isinstance(doc, dict):
        raise SchemaError("$", "expected an object")
    num_players = doc.get("players")
    if not isinstance(num_players, int) or num_players < 2:
        raise SchemaError("$.players", "expected an integer >= 2")
    adversary = doc.get("adversary")
    if not isinstance(adversary, int) or not (0 <= adversary < num_players):
        raise SchemaError("$.adversary", f"expected a player id in [0, {num_players})")
    if "root" not in doc:
        raise SchemaError("$.root", "missing")

    parent: list[int] = []
    parent_action: list[int] = []
    player: list[int] = []
    infoset: list[int] = []
    payoff: list[float] = []
    children: list[list[int]] = []
    labels: list[tuple[str, ...]] = []

    def new_node() -> int:
        parent.append(-1)
        parent_action.append(-1)
        player.append(LEAF)
        infoset.append(-1)
        payoff.append(0.0)
        children.append([])
        labels.append(())
        return len(parent) - 1

    # (node dict, path, parent id, action index) in DFS order
    stack = [(doc["root"], "$.root", -1, -1)]
    while stack:
        node, path, up, act = stack.pop()
        if not isinstance(node, dict):
            raise SchemaError(path, "expected an object")
        x = new_node()
        parent[x] = up
        parent_action[x] = act
        if up >= 0:
            children[up][act] = x
        if "leaf" in node:
            leaf = node["leaf"]
            if not isinstance(leaf, dict) or not isinstance(
                leaf.get("team_utility"), (int, float)
            ):
                raise SchemaError(f"{path}.leaf.team_utility", "expected a number")
            payoff[x] = float(leaf["team_utility"])
            continue
        p = node.get("player")
        if not isinstance(p, int) or not (0 <= p < num_players):
            raise SchemaError(f"{path}.player", f"expected a player id in [0, {num_players})")
        h = node.get("infoset")
        if not isinstance(h, int):
            raise SchemaError(f"{path}.infoset", "expected an integer id")
        acts = node.get("actions")
        if not isinstance(acts, list) or not acts:
            raise SchemaError(f"{path}.actions", "expected a non-empty array")
        player[x] = p
        infoset[x] = h
        children[x] = [-1] * len(acts)
        labs = []
        for j, a in enumerate(acts):
            apath = f"{path}.actions[{j}]"
            if not isinstance(a, dict) or not isinstance(a.get("label"), str):
                raise SchemaError(f"{apath}.label", "expected a string")
            if "child" not in a:
                raise SchemaError(f"{apath}.child", "missing")
            labs.append(a["label"])
        if len(set(labs)) != len(labs):
            raise SchemaError(f"{path}.actions", "duplicate action label")
        labels[x] = tuple(labs)
        # push right-to-left so children pop in action order
        for j in range(len(acts) - 1, -1, -1):
            stack.append((acts[j]["child"], f"{path}.actions[{j}].child", x, j))

    try:
        game = GameTree(
            num_players=num_players,
            adversary=adversary,
            parent=np.array(parent),
            parent_action=np.array(parent_action),
            player=np.array(player),
            infoset=np.array(infoset),
            payoff=np.array(payoff),
            children=tuple(tuple(c) for c in children),
            labels=tuple(labels),
        )
    except SchemaError:
        raise
    except GameError as exc:
        raise SchemaError("$", str(exc)) from exc
    violations = validate_perfect_recall(game)
    if violations:
        raise RecallError(violations)
    return game


def game_to_dict(game: GameTree) -> dict:
    def node_dict(x: int) -> dict:
        if game.is_leaf(x):
            return {"leaf": {"team_utility": float(game.payoff[x])}}
        return {
            "player": int(game.player[x]),
            "infoset": int(game.infoset[x]),
            "actions": [
                {"label": lab, "child": node_dict(c)}
                for lab, c in zip(game.labels[x], game.children[x])
            ],
        }

    return {
        "players": game.num_players,
        "adversary": game.adversary,
        "root": node_dict(0),
    }


def load_game(text: str) -> GameTree:
    """Parse a JSON game document; raises on schema or recall problems."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from exc
    return game_from_dict(doc)


def save_game(game: GameTree) -> str:
    return json.dumps(game_to_dict(game), indent=2)
