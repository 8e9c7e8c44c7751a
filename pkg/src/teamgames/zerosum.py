"""Sequence-form maxmin solving between two effective sides.

Used whenever a game collapses to one maximizer and one minimizer over
realization plans: the folded team-player game, and the one-teammate
subproblems of the no-device solver (where the other teammates'
probabilities are folded into the payoff entries).

The maxmin LP has variables (r, v) with r the maximizer's plan and v one
value per minimizer infoset row:

    max  f_min . v
    s.t. F_min^T v - U^T r <= 0      (one row per minimizer sequence)
         F_max r = f_max,  r >= 0,  v free

The minmax LP is the symmetric program for the minimizer; both optimal
values agree (duality), which callers may assert.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .linprog import EQ, LE, GE, LinearProgram, MPSolution, solve_lp
from .sequence_form import ConstraintSystem


@dataclass
class ZeroSumSolution:
    value: float
    max_plan: np.ndarray
    min_plan: np.ndarray
    maxmin: MPSolution
    minmax: MPSolution


def payoff_coo(
    entries: dict[tuple[int, int], float], shape: tuple[int, int]
) -> sp.coo_matrix:
    """Sparse (max sequence, min sequence) -> value matrix."""
    if not entries:
        return sp.coo_matrix(shape)
    keys = list(entries)
    rows = [k[0] for k in keys]
    cols = [k[1] for k in keys]
    vals = [entries[k] for k in keys]
    return sp.coo_matrix((vals, (rows, cols)), shape=shape)


def _one_sided(
    payoff: sp.spmatrix,
    own: ConstraintSystem,
    other: ConstraintSystem,
    sense: str,
) -> MPSolution:
    """LP for one side; ``payoff`` rows are the own sequences."""
    n_own = payoff.shape[0]
    n_other = payoff.shape[1]
    rows_other = other.num_rows
    # columns: [r_own | v_other-rows]
    top = sp.hstack([-payoff.T, other.matrix.T], format="csr")
    own_block = sp.hstack([own.matrix, sp.csr_matrix((own.num_rows, rows_other))], format="csr")
    a = sp.vstack([top, own_block], format="csr")
    relations = [LE if sense == "max" else GE] * n_other + [EQ] * own.num_rows
    rhs = np.concatenate([np.zeros(n_other), own.rhs])
    objective = np.concatenate([np.zeros(n_own), other.rhs])
    bounds = [(0.0, None)] * n_own + [(None, None)] * rows_other
    lp = LinearProgram(
        sense=sense, objective=objective, a=a, relations=relations, rhs=rhs, bounds=bounds
    )
    sol = solve_lp(lp)
    if sol.status != "optimal":
        raise RuntimeError(f"sequence-form LP unexpectedly {sol.status}")
    return sol


def solve_maxmin(
    payoff: sp.spmatrix,
    max_system: ConstraintSystem,
    min_system: ConstraintSystem,
) -> ZeroSumSolution:
    """Optimal plans for both sides of ``max_r min_s r^T U s``.

    ``payoff`` is (max sequences) x (min sequences), sparse. Each side is
    solved by its own LP; the values agree up to the duality tolerance.
    """
    payoff = payoff.tocsr()
    maxmin = _one_sided(payoff, max_system, min_system, "max")
    minmax = _one_sided(payoff.T.tocsr(), min_system, max_system, "min")
    n_max = payoff.shape[0]
    n_min = payoff.shape[1]
    return ZeroSumSolution(
        value=float(maxmin.objective),
        max_plan=maxmin.x[:n_max].copy(),
        min_plan=minmax.x[:n_min].copy(),
        maxmin=maxmin,
        minmax=minmax,
    )
