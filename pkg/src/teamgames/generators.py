"""Game instance generators.

Three families: seeded random trees with a tunable information
structure, the closed-form worst-case families (an adversary the whole
team must match, with or without a spy watching her), and games encoding
CNF formulas whose team best response counts satisfiable clauses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .game import GameTree
from .serialize import game_from_dict


@dataclass(frozen=True)
class RandomGameConfig:
    """Parameters of the random generator.

    ``nu`` is the probability that a fresh decision node joins an
    existing compatible information set of its player instead of opening
    a new one; 0 yields perfect information. ``branching`` is either a
    fixed action count or a list of (count, probability) pairs. Depth is
    a maximum; with ``early_leaf_prob`` > 0 internal nodes deeper than
    the player count may terminate early.
    """

    num_players: int = 3
    depth: int = 5
    nu: float = 0.5
    branching: int | tuple[tuple[int, float], ...] = 2
    seed: int = 0
    early_leaf_prob: float = 0.0

    def __post_init__(self):
        if self.num_players < 2:
            raise ValueError("need at least 2 players")
        if self.depth < 1:
            raise ValueError("depth must be positive")
        if not (0.0 <= self.nu <= 1.0):
            raise ValueError("nu must lie in [0, 1]")


def _sample_branching(cfg: RandomGameConfig, rng: np.random.Generator) -> int:
    if isinstance(cfg.branching, int):
        return cfg.branching
    counts = [c for c, _ in cfg.branching]
    probs = np.array([p for _, p in cfg.branching], dtype=float)
    return int(rng.choice(counts, p=probs / probs.sum()))


def generate_random(cfg: RandomGameConfig) -> GameTree:
    """Seeded random game; guaranteed perfect recall by construction.

    Nodes are expanded depth-first. Each new decision node is assigned a
    uniformly random player; with probability ``nu`` it joins an existing
    infoset of that player having the same action count and the same
    own-action history (the compatibility that preserves recall),
    otherwise it opens a new infoset. Leaf payoffs are iid uniform [0,1].
    """
    rng = np.random.default_rng(cfg.seed)
    n = cfg.num_players
    adversary = n - 1
    next_infoset = [0] * n
    # per player: infoset -> (action count, owner's action history at entry)
    registry: list[dict[int, tuple[int, tuple]]] = [{} for _ in range(n)]

    def grow(depth: int, history: tuple) -> dict:
        early = (
            cfg.early_leaf_prob > 0.0
            and depth >= n
            and depth < cfg.depth
            and rng.random() < cfg.early_leaf_prob
        )
        if depth >= cfg.depth or early:
            return {"leaf": {"team_utility": float(rng.random())}}
        player = int(rng.integers(n))
        k = _sample_branching(cfg, rng)
        own = tuple(m for m in history if m[0] == player)
        infoset = None
        if rng.random() < cfg.nu:
            compatible = [
                h
                for h, (count, entry) in registry[player].items()
                if count == k and entry == own
            ]
            if compatible:
                infoset = compatible[int(rng.integers(len(compatible)))]
        if infoset is None:
            infoset = next_infoset[player]
            next_infoset[player] += 1
            registry[player][infoset] = (k, own)
        actions = []
        for a in range(k):
            child = grow(depth + 1, history + ((player, infoset, a),))
            actions.append({"label": f"a{a}", "child": child})
        return {"player": player, "infoset": infoset, "actions": actions}

    doc = {"players": n, "adversary": adversary, "root": grow(0, ())}
    return game_from_dict(doc)


def build_example1(n: int, m: int) -> GameTree:
    """Matching game with a spy: the adversary moves first, a spy
    (player 0) observes her perfectly, then every remaining teammate
    picks one of ``m`` actions inside a single own infoset per level.
    The team scores 1 iff every non-spy teammate matched the adversary.

    ``m**(n-1)`` leaves. With a mediator relaying the spy's report the
    team wins always; without any device the best independent play is
    uniform, worth ``m**(2-n)``.
    """
    if n < 3 or m < 2:
        raise ValueError("need n >= 3 players and m >= 2 actions")
    adversary = n - 1
    teammates = list(range(1, n - 1))  # non-spy team levels

    def levels(i: int, adv_action: int, trail: int) -> dict:
        # trail counts how many teammates so far matched adv_action
        if i == len(teammates):
            return {"leaf": {"team_utility": 1.0 if trail == len(teammates) else 0.0}}
        return {
            "player": teammates[i],
            "infoset": 0,
            "actions": [
                {
                    "label": str(a + 1),
                    "child": levels(i + 1, adv_action, trail + (1 if a == adv_action else 0)),
                }
                for a in range(m)
            ],
        }

    root = {
        "player": adversary,
        "infoset": 0,
        "actions": [
            {
                "label": str(k + 1),
                # the spy's singleton one-action infosets are what let a
                # mediator distinguish the adversary's move
                "child": {
                    "player": 0,
                    "infoset": k,
                    "actions": [{"label": "obs", "child": levels(0, k, 0)}],
                },
            }
            for k in range(m)
        ],
    }
    return game_from_dict({"players": n, "adversary": adversary, "root": root})


def build_example2(n: int, m: int) -> GameTree:
    """Matching game without a spy: one level per player, the adversary
    first, each teammate's whole level forming a single infoset. The team
    scores 1 iff everyone matched the adversary. ``m**n`` leaves."""
    if n < 3 or m < 2:
        raise ValueError("need n >= 3 players and m >= 2 actions")
    adversary = n - 1
    teammates = list(range(n - 1))

    def levels(i: int, adv_action: int, all_match: bool) -> dict:
        if i == len(teammates):
            return {"leaf": {"team_utility": 1.0 if all_match else 0.0}}
        return {
            "player": teammates[i],
            "infoset": 0,
            "actions": [
                {
                    "label": str(a + 1),
                    "child": levels(i + 1, adv_action, all_match and a == adv_action),
                }
                for a in range(m)
            ],
        }

    root = {
        "player": adversary,
        "infoset": 0,
        "actions": [
            {"label": str(k + 1), "child": levels(0, k, True)} for k in range(m)
        ],
    }
    return game_from_dict({"players": n, "adversary": adversary, "root": root})


@dataclass(frozen=True)
class CnfFormula:
    """CNF formula with DIMACS-signed literals (1-based variables)."""

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError("formula needs at least one variable")
        if not self.clauses:
            raise ValueError("formula needs at least one clause")
        for c, clause in enumerate(self.clauses):
            if not clause:
                raise ValueError(f"clause {c} is empty")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"clause {c}: literal {lit} out of range")

    def satisfied_count(self, assignment: dict[int, bool]) -> int:
        return sum(
            1
            for clause in self.clauses
            if any(assignment[abs(l)] == (l > 0) for l in clause)
        )

    def max_satisfiable(self) -> int:
        """Brute force over all assignments; exponential, small formulas only."""
        best = 0
        for bits in range(2**self.num_vars):
            assignment = {v + 1: bool(bits >> v & 1) for v in range(self.num_vars)}
            best = max(best, self.satisfied_count(assignment))
        return best


def parse_dimacs(text: str) -> CnfFormula:
    num_vars = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith(("c", "%")):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line: {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                if current:
                    clauses.append(tuple(current))
                    current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if num_vars is None:
        num_vars = max(abs(l) for clause in clauses for l in clause)
    return CnfFormula(num_vars=num_vars, clauses=tuple(clauses))


def random_cnf(num_vars: int, num_clauses: int, clause_size: int = 3, seed: int = 0) -> CnfFormula:
    """Random k-CNF with distinct variables per clause, random polarity."""
    rng = np.random.default_rng(seed)
    k = min(clause_size, num_vars)
    clauses = []
    for _ in range(num_clauses):
        variables = rng.choice(num_vars, size=k, replace=False) + 1
        clauses.append(
            tuple(int(v) if rng.random() < 0.5 else -int(v) for v in sorted(variables))
        )
    return CnfFormula(num_vars=num_vars, clauses=tuple(clauses))


def build_maxsat_game(formula: CnfFormula) -> GameTree:
    """Game whose team best response against a uniform adversary counts
    satisfiable clauses.

    The adversary opens with one action per clause. Player 0 then picks,
    in a singleton infoset per clause, one of the clause's variables;
    player 1 assigns that variable true or false in a single infoset per
    variable (shared across clauses, so her assignment is consistent).
    The team scores 1 iff the picked variable's occurrence in the clause
    comes out true.
    """
    clause_vars: list[list[int]] = []
    for clause in formula.clauses:
        seen: list[int] = []
        for lit in clause:
            if abs(lit) not in seen:
                seen.append(abs(lit))
        clause_vars.append(seen)

    def leaf(clause: tuple[int, ...], var: int, value: bool) -> dict:
        sat = any(abs(l) == var and (l > 0) == value for l in clause)
        return {"leaf": {"team_utility": 1.0 if sat else 0.0}}

    def assign_node(c: int, var: int) -> dict:
        clause = formula.clauses[c]
        return {
            "player": 1,
            "infoset": var,  # one infoset per variable
            "actions": [
                {"label": "T", "child": leaf(clause, var, True)},
                {"label": "F", "child": leaf(clause, var, False)},
            ],
        }

    root = {
        "player": 2,
        "infoset": 0,
        "actions": [
            {
                "label": f"c{c}",
                "child": {
                    "player": 0,
                    "infoset": c,  # singleton per clause
                    "actions": [
                        {"label": f"x{v}", "child": assign_node(c, v)}
                        for v in clause_vars[c]
                    ],
                },
            }
            for c in range(len(formula.clauses))
        ],
    }
    return game_from_dict({"players": 3, "adversary": 2, "root": root})
