"""Game-tree model for zero-sum single-team single-adversary games.

A game is a finite tree of decision nodes and leaves. Every decision node
is owned by one player and belongs to one of that player's information
sets; every leaf carries the team's utility. The adversary's payoff is
implied (``-t * team_utility`` for ``t`` team members) and never stored.

Nodes are kept in flat arrays indexed by node id, with id 0 the root and
ids assigned in depth-first preorder. The arrays are frozen after
construction, so a validated tree can be shared freely between solvers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

#: player value marking a leaf in the ``player`` array
LEAF = -1


class GameError(Exception):
    """Base class for game construction and validation failures."""


class StructureError(GameError):
    """The node arrays do not describe a rooted tree."""


class RecallError(GameError):
    """A player's information sets violate perfect recall."""

    def __init__(self, violations: list["RecallViolation"]):
        self.violations = violations
        lines = ", ".join(str(v) for v in violations[:3])
        more = "" if len(violations) <= 3 else f" (+{len(violations) - 3} more)"
        super().__init__(f"perfect recall violated: {lines}{more}")


@dataclass(frozen=True)
class RecallViolation:
    """Two nodes of one information set with different own-action histories."""

    player: int
    infoset: int
    node_a: int
    node_b: int

    def __str__(self) -> str:
        return (
            f"player {self.player}, infoset {self.infoset}: "
            f"nodes {self.node_a} and {self.node_b} disagree"
        )


@dataclass(frozen=True)
class TeamSpec:
    """The team (every player except the declared adversary)."""

    members: tuple[int, ...]
    adversary: int

    def __post_init__(self) -> None:
        if not self.members:
            raise GameError("team must have at least one member")
        if self.adversary in self.members:
            raise GameError("adversary cannot be a team member")

    @classmethod
    def from_game(cls, game: "GameTree") -> "TeamSpec":
        return cls(members=game.team, adversary=game.adversary)


class GameTree:
    """Immutable extensive-form game tree.

    Parameters are parallel arrays over node ids. ``player[x]`` is ``LEAF``
    for leaves; ``infoset[x]`` is an id scoped to the owning player;
    ``children[x]`` lists child node ids in action order and ``labels[x]``
    the matching action labels; ``payoff[x]`` is the team utility and is
    only meaningful at leaves.
    """

    def __init__(
        self,
        num_players: int,
        adversary: int,
        parent: np.ndarray,
        parent_action: np.ndarray,
        player: np.ndarray,
        infoset: np.ndarray,
        payoff: np.ndarray,
        children: tuple[tuple[int, ...], ...],
        labels: tuple[tuple[str, ...], ...],
        validate: bool = True,
    ):
        self.num_players = int(num_players)
        self.adversary = int(adversary)
        self.parent = np.asarray(parent, dtype=np.int64)
        self.parent_action = np.asarray(parent_action, dtype=np.int64)
        self.player = np.asarray(player, dtype=np.int64)
        self.infoset = np.asarray(infoset, dtype=np.int64)
        self.payoff = np.asarray(payoff, dtype=np.float64)
        self.children = children
        self.labels = labels
        self._infosets: dict[int, dict[int, list[int]]] | None = None
        if validate:
            self.validate_structure()

    # -- basic shape ---------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return len(self.player)

    @property
    def team(self) -> tuple[int, ...]:
        return tuple(p for p in range(self.num_players) if p != self.adversary)

    def is_leaf(self, node: int) -> bool:
        return self.player[node] == LEAF

    @property
    def leaves(self) -> np.ndarray:
        return np.flatnonzero(self.player == LEAF)

    @property
    def decision_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.player != LEAF)

    def adversary_payoff(self, leaf: int) -> float:
        return -len(self.team) * float(self.payoff[leaf])

    def depth(self, node: int) -> int:
        d = 0
        while self.parent[node] >= 0:
            node = self.parent[node]
            d += 1
        return d

    def max_depth(self) -> int:
        return max(self.depth(l) for l in self.leaves)

    def infosets(self, player: int) -> dict[int, list[int]]:
        """Map each of ``player``'s infoset ids to its member nodes (id order)."""
        if self._infosets is None:
            table: dict[int, dict[int, list[int]]] = {p: {} for p in range(self.num_players)}
            for x in range(self.num_nodes):
                p = int(self.player[x])
                if p != LEAF:
                    table[p].setdefault(int(self.infoset[x]), []).append(x)
            self._infosets = table
        if player not in self._infosets:
            raise ValueError(f"unknown player id {player}")
        return self._infosets[player]

    def dfs(self) -> Iterator[int]:
        """Node ids in depth-first preorder (children in action order)."""
        stack = [0]
        while stack:
            x = stack.pop()
            yield x
            stack.extend(reversed(self.children[x]))

    # -- validation ----------------------------------------------------

    def validate_structure(self) -> None:
        n = self.num_nodes
        if n == 0:
            raise StructureError("empty game")
        if not (2 <= self.num_players):
            raise GameError(f"need at least 2 players, got {self.num_players}")
        if not (0 <= self.adversary < self.num_players):
            raise GameError(f"adversary id {self.adversary} out of range")
        if len(self.parent) != n or len(self.children) != n or len(self.labels) != n:
            raise StructureError("node arrays have inconsistent lengths")
        if self.parent[0] != -1:
            raise StructureError("node 0 must be the root (parent -1)")
        seen = np.zeros(n, dtype=bool)
        count = 0
        for x in self.dfs():
            if seen[x]:
                raise StructureError(f"node {x} reachable twice (cycle or shared child)")
            seen[x] = True
            count += 1
            for j, c in enumerate(self.children[x]):
                if not (0 <= c < n):
                    raise StructureError(f"node {x}: child id {c} out of range")
                if self.parent[c] != x or self.parent_action[c] != j:
                    raise StructureError(f"node {c}: parent link inconsistent")
        if count != n:
            orphans = np.flatnonzero(~seen)
            raise StructureError(f"orphan nodes not reachable from root: {orphans[:5].tolist()}")
        for x in range(n):
            p = int(self.player[x])
            if p == LEAF:
                if self.children[x]:
                    raise StructureError(f"leaf {x} has children")
                continue
            if not (0 <= p < self.num_players):
                raise GameError(f"node {x}: player id {p} out of range")
            if not self.children[x]:
                raise StructureError(f"decision node {x} has no actions")
            if len(self.children[x]) != len(self.labels[x]):
                raise StructureError(f"node {x}: labels do not match children")
            if len(set(self.labels[x])) != len(self.labels[x]):
                raise GameError(f"node {x}: duplicate action label")
        # all nodes of one infoset carry identical ordered action labels
        for p in range(self.num_players):
            for h, nodes in self.infosets(p).items():
                first = self.labels[nodes[0]]
                for x in nodes[1:]:
                    if self.labels[x] != first:
                        raise GameError(
                            f"player {p} infoset {h}: nodes {nodes[0]} and {x} "
                            f"have different action labels"
                        )

    # -- equality ------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GameTree):
            return NotImplemented
        return (
            self.num_players == other.num_players
            and self.adversary == other.adversary
            and np.array_equal(self.parent, other.parent)
            and np.array_equal(self.parent_action, other.parent_action)
            and np.array_equal(self.player, other.player)
            and np.array_equal(self.infoset, other.infoset)
            and np.array_equal(self.payoff, other.payoff)
            and self.children == other.children
            and self.labels == other.labels
        )

    def __hash__(self):  # pragma: no cover - identity hashing is fine here
        return id(self)

    def replace_partition(
        self, player: np.ndarray | None = None, infoset: np.ndarray | None = None
    ) -> "GameTree":
        """Copy of this tree with new ownership/infoset arrays (same shape)."""
        return GameTree(
            num_players=self.num_players,
            adversary=self.adversary,
            parent=self.parent,
            parent_action=self.parent_action,
            player=self.player if player is None else np.asarray(player),
            infoset=self.infoset if infoset is None else np.asarray(infoset),
            payoff=self.payoff,
            children=self.children,
            labels=self.labels,
        )


def own_history(game: GameTree, node: int) -> tuple[tuple[int, int], ...]:
    """The (infoset, action index) moves of ``node``'s owner above it.

    Only moves of the player acting at ``node`` are reported, in root-to-node
    order; this is the quantity perfect recall constrains.
    """
    p = int(game.player[node])
    return history_for(game, node, p)


def history_for(game: GameTree, node: int, player: int) -> tuple[tuple[int, int], ...]:
    moves = []
    x = node
    while game.parent[x] >= 0:
        up = int(game.parent[x])
        if game.player[up] == player:
            moves.append((int(game.infoset[up]), int(game.parent_action[x])))
        x = up
    moves.reverse()
    return tuple(moves)


def validate_perfect_recall(game: GameTree) -> list[RecallViolation]:
    """Check that nodes sharing an infoset share the owner's action history.

    Returns one violation per offending (infoset, node) pair against the
    infoset's first node. Structural defects raise :class:`StructureError`
    instead of being reported as recall violations.
    """
    game.validate_structure()
    violations = []
    for p in range(game.num_players):
        for h, nodes in game.infosets(p).items():
            ref = history_for(game, nodes[0], p)
            for x in nodes[1:]:
                if history_for(game, x, p) != ref:
                    violations.append(RecallViolation(p, h, nodes[0], x))
    return violations


def is_spy(game: GameTree, player: int) -> bool:
    """True iff every infoset of ``player`` is a singleton with one action.

    Such a player never influences play directly; she matters only through
    what she can report. Raises ``ValueError`` for ids outside the team.
    """
    if not (0 <= player < game.num_players):
        raise ValueError(f"unknown player id {player}")
    if player == game.adversary:
        raise ValueError("the adversary is not a team member")
    for _, nodes in game.infosets(player).items():
        if len(nodes) != 1 or len(game.children[nodes[0]]) != 1:
            return False
    return True
