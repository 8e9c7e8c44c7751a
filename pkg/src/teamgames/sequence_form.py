"""Sequence-form representation of a game.

A sequence of player ``i`` is the chain of ``i``'s own (infoset, action)
moves on a root path; index 0 is the empty sequence. Strategies become
realization plans ``r`` over sequences constrained by the sparse flow
system ``F r = f``, whose size is linear in the tree. Sequence indices
are assigned in depth-first order of the tree, so every downstream LP is
built over a deterministic column ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .game import GameError, GameTree

#: absolute tolerance for flow-constraint satisfaction (simplex output at
#: double precision does not warrant anything tighter)
CONSTRAINT_TOL = 1e-9


@dataclass
class SequenceSet:
    """Interned sequences of one player.

    ``parent[q]`` is the sequence extended by ``q`` (-1 for the empty
    sequence), ``via_infoset[q]``/``via_action[q]`` the appended move.
    """

    player: int
    parent: np.ndarray
    via_infoset: np.ndarray
    via_action: np.ndarray
    #: infoset -> the unique sequence leading to it (perfect recall)
    infoset_entry: dict[int, int]
    #: infoset -> extension sequence ids, in action order
    infoset_extensions: dict[int, list[int]]

    @property
    def size(self) -> int:
        return len(self.parent)

    def chain(self, q: int) -> tuple[tuple[int, int], ...]:
        """The (infoset, action) moves making up sequence ``q``."""
        moves = []
        while q > 0:
            moves.append((int(self.via_infoset[q]), int(self.via_action[q])))
            q = int(self.parent[q])
        moves.reverse()
        return tuple(moves)


@dataclass
class ConstraintSystem:
    """Flow constraints ``F r = f`` of one player.

    Row 0 pins the empty sequence to one; each further row balances an
    infoset: -1 at its entry sequence, +1 at each extension.
    """

    matrix: sp.csr_matrix
    rhs: np.ndarray
    row_of_infoset: dict[int, int]

    @property
    def num_rows(self) -> int:
        return self.matrix.shape[0]

    def residual(self, probs: np.ndarray) -> float:
        return float(np.max(np.abs(self.matrix @ probs - self.rhs)))


@dataclass
class RealizationPlan:
    player: int
    probs: np.ndarray

    def is_pure(self, tol: float = CONSTRAINT_TOL) -> bool:
        return bool(np.all(np.minimum(np.abs(self.probs), np.abs(self.probs - 1.0)) <= tol))


@dataclass
class TerminalUtilityMap:
    """Team utility indexed by per-player terminal sequence profiles."""

    leaves: np.ndarray
    profiles: np.ndarray  # shape (num_leaves, num_players)
    values: np.ndarray
    _index: dict[tuple[int, ...], int] = field(default_factory=dict, repr=False)

    def as_dict(self) -> dict[tuple[int, ...], tuple[int, float]]:
        return {
            tuple(int(q) for q in self.profiles[k]): (int(self.leaves[k]), float(self.values[k]))
            for k in range(len(self.leaves))
        }

    def lookup(self, profile: tuple[int, ...]) -> tuple[int, float] | None:
        if not self._index:
            for k in range(len(self.leaves)):
                self._index[tuple(int(q) for q in self.profiles[k])] = k
        k = self._index.get(tuple(profile))
        if k is None:
            return None
        return int(self.leaves[k]), float(self.values[k])


@dataclass
class SequenceForm:
    game: GameTree
    sets: tuple[SequenceSet, ...]
    systems: tuple[ConstraintSystem, ...]
    #: node_seq[x, i] = sequence of player i on the path into node x
    node_seq: np.ndarray
    terminal: TerminalUtilityMap

    def path(self, node: int, players) -> tuple[int, ...]:
        """Sequence profile of ``players`` on the path into ``node``.

        Total on all nodes; the root maps to the all-empty profile.
        """
        return tuple(int(self.node_seq[node, p]) for p in players)


def build_sequence_form(game: GameTree) -> SequenceForm:
    """Derive sequence sets, flow systems and the terminal-utility map.

    Requires perfect recall: if two nodes of an infoset are reached by
    different own sequences there is no unique entry sequence and a
    :class:`GameError` is raised.
    """
    n = game.num_players
    parents = [[-1] for _ in range(n)]
    via_h = [[-1] for _ in range(n)]
    via_a = [[-1] for _ in range(n)]
    entry: list[dict[int, int]] = [{} for _ in range(n)]
    extensions: list[dict[int, list[int]]] = [{} for _ in range(n)]
    node_seq = np.zeros((game.num_nodes, n), dtype=np.int64)

    stack = [0]
    while stack:
        x = stack.pop()
        if game.is_leaf(x):
            continue
        p = int(game.player[x])
        h = int(game.infoset[x])
        cur = int(node_seq[x, p])
        if h in entry[p]:
            if entry[p][h] != cur:
                raise GameError(
                    f"player {p} infoset {h}: no unique entry sequence "
                    f"(perfect recall violated)"
                )
        else:
            entry[p][h] = cur
            ext = []
            for a in range(len(game.children[x])):
                parents[p].append(cur)
                via_h[p].append(h)
                via_a[p].append(a)
                ext.append(len(parents[p]) - 1)
            extensions[p][h] = ext
        for a, child in enumerate(game.children[x]):
            node_seq[child] = node_seq[x]
            node_seq[child, p] = extensions[p][h][a]
        stack.extend(reversed(game.children[x]))

    sets = tuple(
        SequenceSet(
            player=p,
            parent=np.array(parents[p], dtype=np.int64),
            via_infoset=np.array(via_h[p], dtype=np.int64),
            via_action=np.array(via_a[p], dtype=np.int64),
            infoset_entry=entry[p],
            infoset_extensions=extensions[p],
        )
        for p in range(n)
    )
    systems = tuple(_constraint_system(sets[p]) for p in range(n))

    leaves = game.leaves
    profiles = node_seq[leaves]
    values = game.payoff[leaves]
    terminal = TerminalUtilityMap(leaves=leaves, profiles=profiles, values=values.copy())
    return SequenceForm(game=game, sets=sets, systems=systems, node_seq=node_seq, terminal=terminal)


def _constraint_system(sset: SequenceSet) -> ConstraintSystem:
    rows, cols, vals = [0], [0], [1.0]
    row_of = {}
    r = 1
    for h, ext in sset.infoset_extensions.items():
        row_of[h] = r
        rows.append(r)
        cols.append(sset.infoset_entry[h])
        vals.append(-1.0)
        for q in ext:
            rows.append(r)
            cols.append(q)
            vals.append(1.0)
        r += 1
    matrix = sp.csr_matrix((vals, (rows, cols)), shape=(r, sset.size))
    rhs = np.zeros(r)
    rhs[0] = 1.0
    return ConstraintSystem(matrix=matrix, rhs=rhs, row_of_infoset=row_of)


def behavioral_to_realization(
    sf: SequenceForm, player: int, behavior: dict[int, np.ndarray]
) -> RealizationPlan:
    """Fold per-infoset action distributions into a realization plan.

    ``r(qa) = r(q) * pi(h, a)``; each distribution must sum to one within
    the flow tolerance.
    """
    sset = sf.sets[player]
    probs = np.zeros(sset.size)
    probs[0] = 1.0
    for h, ext in sset.infoset_extensions.items():
        dist = np.asarray(behavior[h], dtype=float)
        if len(dist) != len(ext):
            raise ValueError(f"infoset {h}: expected {len(ext)} action probabilities")
        if abs(dist.sum() - 1.0) > CONSTRAINT_TOL:
            raise ValueError(f"infoset {h}: distribution sums to {dist.sum()!r}")
        base = probs[sset.infoset_entry[h]]
        for a, q in enumerate(ext):
            probs[q] = base * dist[a]
    return RealizationPlan(player=player, probs=probs)


def realization_to_behavioral(
    sf: SequenceForm, player: int, probs: np.ndarray
) -> dict[int, np.ndarray]:
    """Recover per-infoset distributions from a realization plan.

    Unreachable infosets (entry probability 0) get the uniform
    distribution, which is realization-equivalent.
    """
    sset = sf.sets[player]
    behavior = {}
    for h, ext in sset.infoset_extensions.items():
        base = probs[sset.infoset_entry[h]]
        if base > CONSTRAINT_TOL:
            behavior[h] = np.maximum(probs[ext], 0.0) / base
        else:
            behavior[h] = np.full(len(ext), 1.0 / len(ext))
        total = behavior[h].sum()
        if total > 0:
            behavior[h] = behavior[h] / total
    return behavior


def uniform_realization(sf: SequenceForm, player: int) -> RealizationPlan:
    """Realization plan of the uniform behavioral strategy."""
    sset = sf.sets[player]
    behavior = {
        h: np.full(len(ext), 1.0 / len(ext)) for h, ext in sset.infoset_extensions.items()
    }
    return behavioral_to_realization(sf, player, behavior)


def check_plan(sf: SequenceForm, plan: RealizationPlan, tol: float = CONSTRAINT_TOL) -> None:
    """Raise if ``plan`` is not a valid realization plan."""
    system = sf.systems[plan.player]
    if abs(plan.probs[0] - 1.0) > tol:
        raise ValueError(f"empty sequence has probability {plan.probs[0]!r}")
    if plan.probs.min(initial=0.0) < -1e-12 - tol:
        raise ValueError("negative sequence probability")
    res = system.residual(plan.probs)
    if res > tol:
        raise ValueError(f"flow constraints violated by {res:g}")


def expected_value_from_profiles(
    terminal: TerminalUtilityMap, plans: dict[int, np.ndarray]
) -> float:
    """Expected team utility as a profile-weighted sum over the terminal map.

    ``plans`` maps every player to their realization probabilities; the
    weight of a leaf is the product of its profile's probabilities.
    """
    weight = np.ones(len(terminal.leaves))
    for p, probs in plans.items():
        weight *= np.asarray(probs)[terminal.profiles[:, p]]
    return float(weight @ terminal.values)
