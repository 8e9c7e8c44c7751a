"""Linear and mixed-binary programming behind one small interface.

LPs go to HiGHS (through scipy) with the dual simplex forced, so
solutions are deterministic, basic, and carry row duals. Binary
variables are handled by a best-first branch-and-bound over LP
relaxations: branch on the most fractional binary (ties to the lowest
index), children inherit the parent bound as their priority, and the
incumbent is replaced only on strict improvement, which keeps repeated
solves byte-reproducible.

All tolerances live here: feasibility 1e-7, integrality 1e-6, duality
gap 1e-6.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog as _scipy_linprog

FEASIBILITY_TOL = 1e-7
INTEGRALITY_TOL = 1e-6
DUALITY_TOL = 1e-6

LE, EQ, GE = "<=", "==", ">="

_STATUS = {0: "optimal", 1: "iteration-limit", 2: "infeasible", 3: "unbounded"}


class SolverError(RuntimeError):
    """The backend reported numerical failure."""


@dataclass
class LinearProgram:
    """``sense``-imize ``objective @ x`` subject to rows and bounds.

    ``a`` is dense or scipy-sparse with one relation/rhs per row; bounds
    are (lo, hi) pairs with ``None`` for infinity. ``binary`` marks
    variables restricted to {0, 1}.
    """

    sense: str
    objective: np.ndarray
    a: sp.spmatrix | np.ndarray
    relations: list[str]
    rhs: np.ndarray
    bounds: list[tuple[float | None, float | None]]
    binary: np.ndarray | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.rhs = np.asarray(self.rhs, dtype=float)
        if self.sense not in ("max", "min"):
            raise ValueError(f"sense must be 'max' or 'min', got {self.sense!r}")
        m, n = self.a.shape
        if len(self.objective) != n or len(self.bounds) != n:
            raise ValueError("objective/bounds do not match the number of columns")
        if len(self.relations) != m or len(self.rhs) != m:
            raise ValueError("relations/rhs do not match the number of rows")
        for rel in self.relations:
            if rel not in (LE, EQ, GE):
                raise ValueError(f"unknown relation {rel!r}")
        for lo, hi in self.bounds:
            if lo is not None and hi is not None and lo > hi:
                raise ValueError(f"empty bound interval ({lo}, {hi})")
        if self.binary is not None:
            self.binary = np.asarray(self.binary, dtype=bool)
            if len(self.binary) != n:
                raise ValueError("binary mask does not match the number of columns")
            for j in np.flatnonzero(self.binary):
                lo, hi = self.bounds[j]
                if (lo is not None and lo < 0) or (hi is not None and hi > 1):
                    raise ValueError(f"binary variable {j} needs bounds within [0, 1]")

    @property
    def num_vars(self) -> int:
        return self.a.shape[1]

    def has_binaries(self) -> bool:
        return self.binary is not None and bool(self.binary.any())


@dataclass
class MPSolution:
    status: str
    objective: float | None = None
    x: np.ndarray | None = None
    #: row duals as shadow prices d(objective)/d(rhs); LP only
    duals: np.ndarray | None = None
    #: per-variable shadow prices of the lower/upper bounds; LP only
    lower_duals: np.ndarray | None = None
    upper_duals: np.ndarray | None = None
    iterations: int = 0
    nodes: int = 0
    #: best unexplored relaxation bound when stopping early (MILP)
    bound: float | None = None


def solve_lp(lp: LinearProgram, maxiter: int | None = None) -> MPSolution:
    """Solve the continuous program, ignoring any binary mask."""
    sense = 1.0 if lp.sense == "min" else -1.0
    a = lp.a.tocsr() if sp.issparse(lp.a) else sp.csr_matrix(np.atleast_2d(lp.a))
    m = a.shape[0]
    rel = np.array([{LE: 0, EQ: 1, GE: 2}[r] for r in lp.relations])

    ub_rows = np.flatnonzero(rel != 1)
    eq_rows = np.flatnonzero(rel == 1)
    # >= rows are negated into <= form; the flip is undone in the duals
    flip = np.where(rel[ub_rows] == 2, -1.0, 1.0)
    a_ub = sp.diags(flip) @ a[ub_rows] if len(ub_rows) else None
    b_ub = flip * lp.rhs[ub_rows] if len(ub_rows) else None
    a_eq = a[eq_rows] if len(eq_rows) else None
    b_eq = lp.rhs[eq_rows] if len(eq_rows) else None

    options = {}
    if maxiter is not None:
        options["maxiter"] = maxiter
    res = _scipy_linprog(
        sense * lp.objective,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=lp.bounds,
        method="highs-ds",
        options=options,
    )
    if res.status == 4:
        raise SolverError(res.message)
    status = _STATUS[res.status]
    if status != "optimal":
        return MPSolution(status=status, iterations=int(getattr(res, "nit", 0)))

    duals = np.zeros(m)
    if len(ub_rows):
        duals[ub_rows] = sense * flip * np.asarray(res.ineqlin.marginals)
    if len(eq_rows):
        duals[eq_rows] = sense * np.asarray(res.eqlin.marginals)
    return MPSolution(
        status="optimal",
        objective=float(sense * res.fun),
        x=np.asarray(res.x, dtype=float),
        duals=duals,
        lower_duals=sense * np.asarray(res.lower.marginals),
        upper_duals=sense * np.asarray(res.upper.marginals),
        iterations=int(getattr(res, "nit", 0)),
    )


def dual_objective(lp: LinearProgram, sol: MPSolution) -> float:
    """rhs @ duals plus finite-bound terms; matches the primal objective
    at optimality (strong duality)."""
    total = float(sol.duals @ lp.rhs)
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo is not None and lo != 0.0:
            total += sol.lower_duals[j] * lo
        if hi is not None:
            total += sol.upper_duals[j] * hi
    # lower bounds at exactly 0 contribute nothing
    return total


def solve_milp(
    lp: LinearProgram, node_limit: int = 100_000, engine: str = "highs"
) -> MPSolution:
    """Global optimum over the binary variables.

    ``engine="highs"`` (default) hands the whole program to HiGHS's
    branch-and-cut, which is deterministic and far faster on large
    instances; ``engine="bnb"`` runs the bundled best-first
    branch-and-bound over LP relaxations. Hitting the node limit returns
    the incumbent with status ``iteration-limit`` and the best
    outstanding bound; both engines implement the same contract.
    """
    if not lp.has_binaries():
        raise ValueError("no binary variables declared; use solve_lp")
    if engine == "highs":
        return _solve_milp_highs(lp, node_limit)
    if engine != "bnb":
        raise ValueError(f"unknown engine {engine!r}")
    sign = 1.0 if lp.sense == "max" else -1.0
    binaries = np.flatnonzero(lp.binary)

    base_bounds = list(lp.bounds)
    for j in binaries:
        lo, hi = base_bounds[j]
        base_bounds[j] = (
            0.0 if lo is None else max(0.0, lo),
            1.0 if hi is None else min(1.0, hi),
        )

    def relax(fixes: dict[int, float]) -> MPSolution:
        bounds = list(base_bounds)
        for j, v in fixes.items():
            bounds[j] = (v, v)
        return solve_lp(
            LinearProgram(
                sense=lp.sense,
                objective=lp.objective,
                a=lp.a,
                relations=lp.relations,
                rhs=lp.rhs,
                bounds=bounds,
            )
        )

    incumbent: np.ndarray | None = None
    inc_val = -np.inf  # in sign space: larger is better for either sense
    nodes = 0
    counter = 0
    # heap keys are negated sign-space parent bounds: pop the most promising
    heap: list[tuple[float, int, dict[int, float]]] = [(-np.inf, 0, {})]
    limit_hit = False
    best_open: float | None = None

    while heap:
        neg_bound, _, fixes = heapq.heappop(heap)
        if -neg_bound != np.inf and -neg_bound <= inc_val + 1e-9:
            break  # best-first: every open node is at least this bad
        if nodes >= node_limit:
            limit_hit = True
            best_open = float(sign * -neg_bound) if neg_bound != -np.inf else None
            break
        sol = relax(fixes)
        nodes += 1
        if sol.status != "optimal":
            continue  # infeasible subproblem
        bound = sign * sol.objective
        if bound <= inc_val + 1e-9:
            continue
        frac = np.abs(sol.x[binaries] - np.round(sol.x[binaries]))
        worst = int(np.argmax(frac))
        if frac[worst] <= INTEGRALITY_TOL:
            if bound > inc_val:
                inc_val = bound
                incumbent = sol.x.copy()
                incumbent[binaries] = np.round(incumbent[binaries])
            continue
        j = int(binaries[worst])
        for v in (0.0, 1.0):
            counter += 1
            heapq.heappush(heap, (-bound, counter, {**fixes, j: v}))

    if incumbent is None:
        if limit_hit:
            return MPSolution(status="iteration-limit", nodes=nodes, bound=best_open)
        return MPSolution(status="infeasible", nodes=nodes)
    objective = float(sign * inc_val)
    return MPSolution(
        status="iteration-limit" if limit_hit else "optimal",
        objective=objective,
        x=incumbent,
        nodes=nodes,
        bound=best_open if limit_hit else objective,
    )


def _solve_milp_highs(lp: LinearProgram, node_limit: int) -> MPSolution:
    from scipy.optimize import Bounds, LinearConstraint, milp as _scipy_milp

    sense = 1.0 if lp.sense == "min" else -1.0
    rels = np.array(lp.relations)
    row_lb = np.where(rels == GE, lp.rhs, np.where(rels == EQ, lp.rhs, -np.inf))
    row_ub = np.where(rels == LE, lp.rhs, np.where(rels == EQ, lp.rhs, np.inf))
    lo = np.array([-np.inf if b[0] is None else b[0] for b in lp.bounds])
    hi = np.array([np.inf if b[1] is None else b[1] for b in lp.bounds])
    lo[lp.binary] = np.maximum(lo[lp.binary], 0.0)
    hi[lp.binary] = np.minimum(hi[lp.binary], 1.0)
    res = _scipy_milp(
        sense * lp.objective,
        constraints=LinearConstraint(lp.a, row_lb, row_ub),
        integrality=lp.binary.astype(int),
        bounds=Bounds(lo, hi),
        options={"node_limit": node_limit},
    )
    status = _STATUS.get(res.status, "iteration-limit")
    nodes = int(getattr(res, "mip_node_count", 0) or 0)
    dual_bound = getattr(res, "mip_dual_bound", None)
    bound = float(sense * dual_bound) if dual_bound is not None else None
    if res.x is None:
        return MPSolution(status=status if status != "optimal" else "infeasible",
                          nodes=nodes, bound=bound)
    x = np.asarray(res.x, dtype=float)
    x[lp.binary] = np.round(x[lp.binary])
    return MPSolution(
        status=status,
        objective=float(sense * res.fun),
        x=x,
        nodes=nodes,
        bound=bound if status != "optimal" else float(sense * res.fun),
    )


def dump_program(lp: LinearProgram) -> str:
    """Sparse textual dump (ROWS/COLUMNS/RHS/BOUNDS) for debugging."""
    a = sp.coo_matrix(lp.a)
    lines = [f"NAME  program sense={lp.sense}", "ROWS"]
    for i, rel in enumerate(lp.relations):
        lines.append(f"  {rel:>2} R{i}")
    lines.append("COLUMNS")
    entries: dict[int, list[tuple[int, float]]] = {}
    for i, j, v in zip(a.row, a.col, a.data):
        entries.setdefault(int(j), []).append((int(i), float(v)))
    for j in range(lp.num_vars):
        mark = " BIN" if lp.binary is not None and lp.binary[j] else ""
        lines.append(f"  C{j} OBJ {lp.objective[j]:.17g}{mark}")
        for i, v in sorted(entries.get(j, [])):
            lines.append(f"  C{j} R{i} {v:.17g}")
    lines.append("RHS")
    for i, b in enumerate(lp.rhs):
        if b != 0.0:
            lines.append(f"  R{i} {b:.17g}")
    lines.append("BOUNDS")
    for j, (lo, hi) in enumerate(lp.bounds):
        lo_s = "-inf" if lo is None else f"{lo:.17g}"
        hi_s = "+inf" if hi is None else f"{hi:.17g}"
        lines.append(f"  C{j} {lo_s} {hi_s}")
    lines.append("ENDATA")
    return "\n".join(lines)
