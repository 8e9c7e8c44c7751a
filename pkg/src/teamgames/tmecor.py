"""Team maxmin with a correlation device, by hybrid column generation.

The adversary stays in sequence form while the team plays lotteries over
joint reduced plans. Columns (plans) are generated on demand: solve the
restricted master for the team, re-solve for the worst-case adversary,
ask a best-response oracle for a new plan, stop when the oracle returns
a plan already in the pool. Plan identity is the induced map from
adversary sequences to terminal nodes, so the membership test works on
equivalence classes rather than action tuples.

Two oracles: an exact mixed-binary program over the teammates' flow
polytopes, and an LP relaxation with seeded randomized rounding plus one
best-response repair sweep per sample.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .evaluation import best_response, uniform_behavior
from .game import GameTree
from .linprog import EQ, GE, LE, LinearProgram, MPSolution, solve_lp, solve_milp
from .sequence_form import (
    RealizationPlan,
    SequenceForm,
    build_sequence_form,
    realization_to_behavioral,
    uniform_realization,
)

#: positive-probability threshold when counting a plan into the support
SUPPORT_TOL = 1e-9


class JointReducedPlan:
    """A pure joint plan of the team, reduced to reachable choices.

    ``moves[i]`` holds player ``team[i]``'s (infoset, action) pairs along
    sequences she plays with probability one. ``key`` is the canonical
    identity: the sorted (adversary sequence, leaf) pairs the plan can
    reach. Plans with equal keys are the same strategy against every
    adversary behaviour, so equality and hashing use only the key.
    """

    __slots__ = ("moves", "key")

    def __init__(self, moves: tuple[tuple[tuple[int, int], ...], ...], key: tuple):
        self.moves = moves
        self.key = key

    def __eq__(self, other):
        return isinstance(other, JointReducedPlan) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def key_hash(self) -> str:
        return hashlib.sha1(repr(self.key).encode()).hexdigest()[:12]

    def column(self, game: GameTree) -> dict[int, float]:
        """Sparse adversary-sequence -> team-utility column."""
        return {q: float(game.payoff[leaf]) for q, leaf in self.key}

    def value_against(self, game: GameTree, adv_probs: np.ndarray) -> float:
        return sum(float(game.payoff[leaf]) * float(adv_probs[q]) for q, leaf in self.key)


def plan_from_moves(
    game: GameTree, sf: SequenceForm, moves_by_player: dict[int, dict[int, int]]
) -> JointReducedPlan:
    """Build a plan from per-teammate infoset -> action choices.

    Only choices at infosets actually reachable under the joint plan and
    some adversary play end up in the canonical key; the stored move sets
    are reduced to each player's own-reachable infosets.
    """
    team = game.team
    adv = game.adversary
    pairs: list[tuple[int, int]] = []
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
            a = moves_by_player[p][int(game.infoset[x])]
            stack.append(game.children[x][a])
    key = tuple(sorted(pairs))
    if len({q for q, _ in key}) != len(key):
        raise AssertionError("joint plan reaches two leaves under one adversary sequence")
    moves = tuple(
        tuple(sorted(_own_reachable(sf, p, moves_by_player[p]).items())) for p in team
    )
    return JointReducedPlan(moves=moves, key=key)


def _own_reachable(
    sf: SequenceForm, player: int, choice: dict[int, int]
) -> dict[int, int]:
    """Restrict a choice map to infosets reachable under the player's own play."""
    sset = sf.sets[player]
    by_entry: dict[int, list[int]] = {}
    for h, q in sset.infoset_entry.items():
        by_entry.setdefault(q, []).append(h)
    out: dict[int, int] = {}
    stack = list(by_entry.get(0, []))
    while stack:
        h = stack.pop()
        a = choice[h]
        out[h] = a
        chosen = sset.infoset_extensions[h][a]
        stack.extend(by_entry.get(chosen, []))
    return out


# ---------------------------------------------------------------------------
# restricted master problems


def hybrid_maxmin(
    columns: list[dict[int, float]], adv_system, f_adv: np.ndarray | None = None
) -> tuple[np.ndarray, float, np.ndarray, MPSolution]:
    """Team side of the restricted game.

    Variables are the lottery over columns plus one value per adversary
    constraint row; there are exactly (number of adversary sequences) + 1
    constraints besides nonnegativity. Returns (sigma, value, duals of
    the sequence rows, raw solution).
    """
    if not columns:
        raise ValueError("need at least one column")
    k = len(columns)
    f = sp.csr_matrix(adv_system.matrix)
    n_rows, n_seq = f.shape
    u_rows, u_cols, u_vals = [], [], []
    for j, col in enumerate(columns):
        for q, val in col.items():
            u_rows.append(q)
            u_cols.append(j)
            u_vals.append(val)
    u = sp.coo_matrix((u_vals, (u_rows, u_cols)), shape=(n_seq, k)).tocsr()
    # rows: per adversary sequence  F^T v - U sigma <= 0 ; then sum sigma = 1
    top = sp.hstack([-u, f.T], format="csr")
    norm = sp.hstack([sp.csr_matrix(np.ones((1, k))), sp.csr_matrix((1, n_rows))])
    a = sp.vstack([top, norm], format="csr")
    lp = LinearProgram(
        sense="max",
        objective=np.concatenate([np.zeros(k), adv_system.rhs]),
        a=a,
        relations=[LE] * n_seq + [EQ],
        rhs=np.concatenate([np.zeros(n_seq), [1.0]]),
        bounds=[(0.0, None)] * k + [(None, None)] * n_rows,
    )
    sol = solve_lp(lp)
    if sol.status != "optimal":
        raise RuntimeError(f"restricted team LP unexpectedly {sol.status}")
    return sol.x[:k].copy(), float(sol.objective), sol.duals[:n_seq].copy(), sol


def hybrid_minmax(
    columns: list[dict[int, float]], adv_system
) -> tuple[np.ndarray, float, MPSolution]:
    """Adversary side: her worst case against the current column pool."""
    if not columns:
        raise ValueError("need at least one column")
    k = len(columns)
    f = sp.csr_matrix(adv_system.matrix)
    n_rows, n_seq = f.shape
    rows, cols, vals = [], [], []
    for j, col in enumerate(columns):
        rows.append(j)
        cols.append(n_seq)  # the v variable
        vals.append(1.0)
        for q, val in col.items():
            rows.append(j)
            cols.append(q)
            vals.append(-val)
    top = sp.coo_matrix((vals, (rows, cols)), shape=(k, n_seq + 1)).tocsr()
    flow = sp.hstack([f, sp.csr_matrix((n_rows, 1))], format="csr")
    a = sp.vstack([top, flow], format="csr")
    lp = LinearProgram(
        sense="min",
        objective=np.concatenate([np.zeros(n_seq), [1.0]]),
        a=a,
        relations=[GE] * k + [EQ] * n_rows,
        rhs=np.concatenate([np.zeros(k), adv_system.rhs]),
        bounds=[(0.0, None)] * n_seq + [(None, None)],
    )
    sol = solve_lp(lp)
    if sol.status != "optimal":
        raise RuntimeError(f"restricted adversary LP unexpectedly {sol.status}")
    return sol.x[:n_seq].copy(), float(sol.objective), sol


# ---------------------------------------------------------------------------
# best-response oracles


@dataclass
class OracleResult:
    plan: JointReducedPlan
    value: float
    optimal: bool = True
    #: valid upper bound on the true best-response value
    bound: float | None = None
    #: per-sample values (randomized oracle only)
    sample_values: np.ndarray | None = None
    relaxation_value: float | None = None
    nodes: int = 0


def _oracle_program(
    game: GameTree, sf: SequenceForm, adv_probs: np.ndarray, binary: bool
) -> tuple[LinearProgram, dict[int, int], int, float]:
    """Shared (I)LP: maximize reach-weighted shifted utility.

    Payoffs are shifted to be nonnegative so that "x bounded by every
    own sequence on the path" exactly linearizes "leaf reached"; the
    shift moves every full play's value by the same constant, which the
    caller subtracts back out.
    """
    team = game.team
    adv = game.adversary
    leaves = game.leaves
    shift = max(0.0, -float(game.payoff[leaves].min()))
    offsets: dict[int, int] = {}
    total = 0
    for p in team:
        offsets[p] = total
        total += sf.sets[p].size
    x0 = total
    total += len(leaves)

    rows_l, cols_l, vals_l = [], [], []
    relations: list[str] = []
    rhs: list[float] = []
    r = 0
    for p in team:
        system = sf.systems[p]
        coo = sp.coo_matrix(system.matrix)
        rows_l.extend(coo.row + r)
        cols_l.extend(coo.col + offsets[p])
        vals_l.extend(coo.data)
        relations.extend([EQ] * system.num_rows)
        rhs.extend(system.rhs.tolist())
        r += system.num_rows
    for k, leaf in enumerate(leaves):
        for p in team:
            q = int(sf.node_seq[leaf, p])
            if q == 0:
                continue  # the empty sequence is pinned to 1 anyway
            rows_l.extend([r, r])
            cols_l.extend([x0 + k, offsets[p] + q])
            vals_l.extend([1.0, -1.0])
            relations.append(LE)
            rhs.append(0.0)
            r += 1

    objective = np.zeros(total)
    for k, leaf in enumerate(leaves):
        w = (float(game.payoff[leaf]) + shift) * float(adv_probs[int(sf.node_seq[leaf, adv])])
        objective[x0 + k] = w
    a = sp.coo_matrix((vals_l, (rows_l, cols_l)), shape=(r, total)).tocsr()
    # only the reach indicators need to be binary: vertices of the flow
    # polytopes are pure plans already, so the plans come out 0/1 anyway
    mask = None
    if binary:
        mask = np.zeros(total, dtype=bool)
        mask[x0:] = True
    lp = LinearProgram(
        sense="max",
        objective=objective,
        a=a,
        relations=relations,
        rhs=np.array(rhs),
        bounds=[(0.0, 1.0)] * total,
        binary=mask,
    )
    return lp, offsets, x0, shift


def _plan_from_realizations(
    game: GameTree, sf: SequenceForm, probs_by_player: dict[int, np.ndarray]
) -> JointReducedPlan:
    # argmax per infoset: sequences forced to one by the reach indicators
    # dominate their siblings (flow), so this recovers the pure plan even
    # if off-path probabilities came back fractional
    moves: dict[int, dict[int, int]] = {}
    for p in game.team:
        sset = sf.sets[p]
        moves[p] = {
            h: int(np.argmax(probs_by_player[p][ext]))
            for h, ext in sset.infoset_extensions.items()
        }
    return plan_from_moves(game, sf, moves)


def br_oracle_exact(
    game: GameTree,
    sf: SequenceForm,
    adv_plan: np.ndarray,
    node_limit: int = 200_000,
) -> OracleResult:
    """Exact team best response to a fixed adversary realization plan.

    Mixed-binary program over one pure realization plan per teammate plus
    a reach indicator per leaf. Hitting the node limit returns the
    incumbent flagged non-optimal together with the outstanding bound.
    """
    lp, offsets, _, shift = _oracle_program(game, sf, adv_plan, binary=True)
    sol = solve_milp(lp, node_limit=node_limit)
    if sol.x is None:
        raise RuntimeError(f"best-response program came back {sol.status}")
    probs = {
        p: sol.x[offsets[p] : offsets[p] + sf.sets[p].size] for p in game.team
    }
    plan = _plan_from_realizations(game, sf, probs)
    optimal = sol.status == "optimal"
    bound = (sol.bound - shift) if sol.bound is not None else None
    return OracleResult(
        plan=plan,
        value=float(sol.objective) - shift,
        optimal=optimal,
        bound=bound,
        nodes=sol.nodes,
    )


def br_oracle_approx(
    game: GameTree,
    sf: SequenceForm,
    adv_plan: np.ndarray,
    rounds: int = 64,
    seed: int | np.random.Generator = 0,
    repair: bool = True,
) -> OracleResult:
    """Approximate best response: LP relaxation plus randomized rounding.

    Pure plans are sampled top-down from the relaxed plans' conditional
    probabilities (rescaled to sum to one at each infoset). Each sample
    then gets one coordinate best-response repair sweep, which is what
    carries the rounding guarantee of the relaxation over to the team's
    actual value. Returns the best of ``rounds`` samples; all sample
    values are reported for diagnostics.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    lp, offsets, _, shift = _oracle_program(game, sf, adv_plan, binary=False)
    rel = solve_lp(lp)
    if rel.status != "optimal":
        raise RuntimeError(f"relaxed best-response LP came back {rel.status}")
    team = game.team
    behavior = {
        p: realization_to_behavioral(
            sf, p, rel.x[offsets[p] : offsets[p] + sf.sets[p].size]
        )
        for p in team
    }
    adv_behavior = realization_to_behavioral(sf, game.adversary, adv_plan)

    by_entry: dict[int, dict[int, list[int]]] = {}
    for p in team:
        table: dict[int, list[int]] = {}
        for h, q in sf.sets[p].infoset_entry.items():
            table.setdefault(q, []).append(h)
        by_entry[p] = table

    def sample_choice(p: int) -> dict[int, int]:
        choice: dict[int, int] = {}
        stack = list(by_entry[p].get(0, []))
        while stack:
            h = stack.pop()
            dist = behavior[p][h]
            a = int(rng.choice(len(dist), p=dist))
            choice[h] = a
            chosen = sf.sets[p].infoset_extensions[h][a]
            stack.extend(by_entry[p].get(chosen, []))
        return choice

    best_plan: JointReducedPlan | None = None
    best_value = -np.inf
    values = np.empty(rounds)
    for it in range(rounds):
        choices = {p: sample_choice(p) for p in team}
        if repair:
            for p in team:
                profile = {game.adversary: adv_behavior}
                for other in team:
                    if other != p:
                        full = dict(uniform_behavior(game, other))
                        for h, a in choices[other].items():
                            dist = np.zeros(len(full[h]))
                            dist[a] = 1.0
                            full[h] = dist
                        profile[other] = full
                _, br_choice = best_response(game, profile, p)
                choices[p] = br_choice
        full_choices = {}
        for p in team:
            filled = {h: 0 for h in sf.sets[p].infoset_extensions}
            filled.update(choices[p])
            full_choices[p] = filled
        plan = plan_from_moves(game, sf, full_choices)
        value = plan.value_against(game, adv_plan)
        values[it] = value
        if value > best_value + 1e-12:
            best_value = value
            best_plan = plan
    return OracleResult(
        plan=best_plan,
        value=float(best_value),
        optimal=False,
        bound=float(rel.objective) - shift,
        sample_values=values,
        relaxation_value=float(rel.objective) - shift,
    )


# ---------------------------------------------------------------------------
# column generation


@dataclass
class TMECorSolution:
    value: float
    sigma: np.ndarray
    columns: list[JointReducedPlan]
    adversary_plan: RealizationPlan
    iterations: int
    support_size: int
    status: str  # optimal | local | gap
    gap: float
    trace: list[tuple[int, float, float]] = field(default_factory=list)
    seconds: float = 0.0
    oracle: str = "exact"

    def support(self) -> list[tuple[JointReducedPlan, float]]:
        return [
            (plan, float(w))
            for plan, w in zip(self.columns, self.sigma)
            if w > SUPPORT_TOL
        ]


def solve_tmecor(
    game: GameTree,
    oracle: str = "exact",
    max_iters: int = 10_000,
    seed: int = 0,
    rounds: int = 64,
    time_limit: float | None = None,
    node_limit: int = 200_000,
    trace_path=None,
) -> TMECorSolution:
    """Hybrid column generation for the correlation-device equilibrium.

    With the exact oracle the returned value is exact on termination;
    the randomized oracle gives an anytime lower bound flagged local.
    Budget exhaustion (iterations, wall clock, oracle node limit) returns
    the incumbent with an explicit optimality gap.
    """
    if oracle not in ("exact", "approx"):
        raise ValueError(f"unknown oracle {oracle!r}")
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    sf = build_sequence_form(game)
    adv = game.adversary
    adv_system = sf.systems[adv]

    def call_oracle(adv_probs: np.ndarray) -> OracleResult:
        if oracle == "exact":
            return br_oracle_exact(game, sf, adv_probs, node_limit=node_limit)
        return br_oracle_approx(game, sf, adv_probs, rounds=rounds, seed=rng)

    r_bar = uniform_realization(sf, adv).probs
    result = call_oracle(r_bar)
    columns: list[JointReducedPlan] = []
    col_data: list[dict[int, float]] = []
    keys: set = set()
    sigma = np.zeros(0)
    value = 0.0
    trace: list[tuple[int, float, float]] = []
    status = "optimal" if oracle == "exact" else "local"
    gap = 0.0
    iters = 0

    while result.plan.key not in keys:
        if iters >= max_iters or (
            time_limit is not None and time.perf_counter() - start > time_limit
        ):
            status = "gap"
            gap = max(0.0, result.value - value)
            break
        iters += 1
        columns.append(result.plan)
        col_data.append(result.plan.column(game))
        keys.add(result.plan.key)
        sigma, value, _, _ = hybrid_maxmin(col_data, adv_system)
        r_bar, minmax_value, _ = hybrid_minmax(col_data, adv_system)
        result = call_oracle(r_bar)
        trace.append((iters, value, result.value))
        if not result.optimal and result.bound is not None:
            # non-optimal oracle: keep going is pointless, report the gap
            status = "gap"
            gap = max(0.0, result.bound - value)
            break

    sigma, value, support_size = _prune_support(
        col_data, adv_system, sigma, value, sf.sets[adv].size
    )
    if trace_path is not None:
        _write_trace(trace_path, trace, columns)
    return TMECorSolution(
        value=value,
        sigma=sigma,
        columns=columns,
        adversary_plan=RealizationPlan(player=adv, probs=r_bar),
        iterations=iters,
        support_size=support_size,
        status=status,
        gap=gap,
        trace=trace,
        seconds=time.perf_counter() - start,
        oracle=oracle,
    )


def _prune_support(col_data, adv_system, sigma, value, n_seq):
    """Crossover pass: drop columns until the support honors the linear
    bound (at most one plan per adversary sequence). The master LP is
    solved on vertices already, so this rarely does anything."""
    if len(sigma) == 0:
        return sigma, value, 0
    count = int(np.sum(sigma > SUPPORT_TOL))
    while count > n_seq:
        dropped = False
        for j in np.argsort(sigma):  # try the smallest positive weight first
            if sigma[j] <= SUPPORT_TOL:
                continue
            idx = [i for i in range(len(col_data)) if i != j and sigma[i] > SUPPORT_TOL]
            if not idx:
                break
            t_sigma, t_value, _, _ = hybrid_maxmin([col_data[i] for i in idx], adv_system)
            if t_value >= value - 1e-9:
                sigma = np.zeros(len(col_data))
                sigma[idx] = t_sigma
                value = t_value
                dropped = True
                break
        count = int(np.sum(sigma > SUPPORT_TOL))
        if not dropped:
            break
    return sigma, value, count


def _write_trace(path, trace, columns):
    lines = ["iteration,restricted_value,oracle_value,column_key_hash"]
    for it, restricted, oracle_value in trace:
        lines.append(f"{it},{restricted!r},{oracle_value!r},{columns[it - 1].key_hash()}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
