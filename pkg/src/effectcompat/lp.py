"""Dense linear programming via the two-phase simplex method.

Problems are tiny (tens of variables and constraints), so everything is
kept dense and deterministic: Bland's rule is used for both the entering
and the leaving choice, which rules out cycling on degenerate problems at
the cost of a few extra pivots.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .tolerances import DEFAULT_TOLERANCES, SolverTolerances

LE = "<="
GE = ">="
EQ = "="
RELATIONS = (LE, GE, EQ)

# Entries below _PIVOT_EPS never serve as pivots; reduced costs above
# -_ENTER_EPS count as optimal.  Both sit well under the user-facing
# tolerances for the well-scaled problems this solver is built for.
_PIVOT_EPS = 1e-11
_ENTER_EPS = 1e-10

# Pivot budget is ITERATION_CAP_FACTOR * (m + n).  Exceeding it raises
# SolverFailure; it is never reported as Infeasible.
ITERATION_CAP_FACTOR = 10_000


class LpError(Exception):
    """Base class for solver errors."""


class LpInputError(LpError):
    """Malformed problem data: shape mismatch, unknown relation, bad bounds."""


class SolverFailure(LpError):
    """The solver gave up (pivot budget exhausted or internal check failed).

    Says nothing about the problem itself, unlike an Infeasible status.
    """


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpProblem:
    """minimize objective . x subject to rows[i] . x (relations[i]) rhs[i].

    Variables are unbounded unless per-variable (lower, upper) bounds are
    given; either bound may be None.
    """

    objective: np.ndarray
    rows: np.ndarray
    relations: tuple[str, ...]
    rhs: np.ndarray
    bounds: tuple[tuple[float | None, float | None], ...] | None = None

    def __post_init__(self) -> None:
        # copies keep the frozen instance detached from caller-owned arrays
        c = np.atleast_1d(np.array(self.objective, dtype=float))
        if c.ndim != 1 or c.size < 1:
            raise LpInputError("objective must be a nonempty 1-d vector")
        n = c.size
        rows = np.array(self.rows, dtype=float)
        if rows.size == 0:
            rows = rows.reshape(0, n)
        if rows.ndim != 2 or rows.shape[1] != n:
            raise LpInputError(
                f"constraint rows must form an (m, {n}) matrix, got shape {rows.shape}"
            )
        m = rows.shape[0]
        rels = tuple(self.relations)
        for rel in rels:
            if rel not in RELATIONS:
                raise LpInputError(f"unknown relation {rel!r}; expected one of {RELATIONS}")
        if len(rels) != m:
            raise LpInputError(f"{m} rows but {len(rels)} relations")
        rhs = np.atleast_1d(np.array(self.rhs, dtype=float))
        if rhs.shape != (m,):
            raise LpInputError(f"rhs must have shape ({m},), got {rhs.shape}")
        if self.bounds is None:
            bounds = tuple((None, None) for _ in range(n))
        else:
            bounds = tuple((lo, hi) for lo, hi in self.bounds)
            if len(bounds) != n:
                raise LpInputError(f"{n} variables but {len(bounds)} bound pairs")
            for j, (lo, hi) in enumerate(bounds):
                if lo is not None and hi is not None and lo > hi:
                    raise LpInputError(f"variable {j}: lower bound {lo} exceeds upper {hi}")
        c.flags.writeable = False
        rows.flags.writeable = False
        rhs.flags.writeable = False
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "bounds", bounds)

    @property
    def n_variables(self) -> int:
        return self.objective.size

    @property
    def n_constraints(self) -> int:
        return self.rows.shape[0]


@dataclass(frozen=True)
class LpResult:
    """Solver outcome; value and point are None unless status is OPTIMAL."""

    status: LpStatus
    value: float | None
    point: np.ndarray | None
    iterations: int


class _Budget:
    def __init__(self, cap: int):
        self.cap = cap
        self.used = 0

    def spend(self) -> None:
        self.used += 1
        if self.used > self.cap:
            raise SolverFailure(
                f"pivot budget exhausted ({self.cap} iterations); "
                "the problem status is undetermined"
            )


def _standardize(problem: LpProblem):
    """Rewrite in nonnegative variables: x = S @ y + t with y >= 0.

    Free variables are split into a positive and a negative part;
    lower-bounded ones are shifted; upper-only ones are reflected.
    Two-sided bounds add a row y_j <= hi - lo.
    Returns (A, rels, b, c, S, t).
    """
    n = problem.n_variables
    cols: list[np.ndarray] = []
    t = np.zeros(n)
    extra_rows: list[tuple[int, float]] = []  # (standard column, upper value)
    for j, (lo, hi) in enumerate(problem.bounds):
        e = np.zeros(n)
        e[j] = 1.0
        if lo is None and hi is None:
            cols.append(e)
            cols.append(-e)
        elif lo is not None:
            t[j] = lo
            cols.append(e)
            if hi is not None:
                extra_rows.append((len(cols) - 1, hi - lo))
        else:  # upper bound only
            t[j] = hi
            cols.append(-e)
    S = np.column_stack(cols)
    A = problem.rows @ S
    b = problem.rhs - problem.rows @ t
    rels = list(problem.relations)
    if extra_rows:
        p = S.shape[1]
        for col, ub in extra_rows:
            row = np.zeros(p)
            row[col] = 1.0
            A = np.vstack([A, row])
            b = np.append(b, ub)
            rels.append(LE)
    c = problem.objective @ S
    return A, rels, b, c, S, t


def _pivot(T: np.ndarray, basis: list[int], row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    T[:, col] = 0.0
    T[row, col] = 1.0
    basis[row] = col


def _install_cost_row(T: np.ndarray, basis: list[int], cost: np.ndarray) -> None:
    T[-1, :-1] = cost
    T[-1, -1] = 0.0
    for i, bv in enumerate(basis):
        coef = T[-1, bv]
        if coef != 0.0:
            T[-1] -= coef * T[i]


def _run_simplex(T: np.ndarray, basis: list[int], budget: _Budget) -> str:
    """Minimize the installed cost row in place; 'optimal' or 'unbounded'."""
    m = T.shape[0] - 1
    while True:
        reduced = T[-1, :-1]
        improving = np.flatnonzero(reduced < -_ENTER_EPS)
        if improving.size == 0:
            return "optimal"
        col = int(improving[0])  # Bland: smallest improving index
        column = T[:m, col]
        positive = column > _PIVOT_EPS
        if not positive.any():
            return "unbounded"
        rhs = np.maximum(T[:m, -1], 0.0)
        ratios = np.full(m, np.inf)
        ratios[positive] = rhs[positive] / column[positive]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + 1e-12 * max(1.0, best))
        row = min(ties, key=lambda i: basis[i])  # Bland again on ties
        budget.spend()
        _pivot(T, basis, int(row), col)


def _build_tableau(A: np.ndarray, rels: list[str], b: np.ndarray):
    """Add slack/surplus/artificial columns; return (T, basis, art_start)."""
    A = A.copy()
    b = b.copy()
    rels = list(rels)
    m, p = A.shape
    for i in range(m):  # make the right-hand side nonnegative
        if b[i] < 0.0:
            A[i] = -A[i]
            b[i] = -b[i]
            if rels[i] == LE:
                rels[i] = GE
            elif rels[i] == GE:
                rels[i] = LE
    n_slack = sum(1 for r in rels if r == LE)
    n_surplus = sum(1 for r in rels if r == GE)
    n_art = sum(1 for r in rels if r != LE)
    slack_start = p
    surplus_start = slack_start + n_slack
    art_start = surplus_start + n_surplus
    width = art_start + n_art
    T = np.zeros((m + 1, width + 1))
    T[:m, :p] = A
    T[:m, -1] = b
    basis: list[int] = []
    i_slack = i_surplus = i_art = 0
    for i, rel in enumerate(rels):
        if rel == LE:
            T[i, slack_start + i_slack] = 1.0
            basis.append(slack_start + i_slack)
            i_slack += 1
        else:
            if rel == GE:
                T[i, surplus_start + i_surplus] = -1.0
                i_surplus += 1
            T[i, art_start + i_art] = 1.0
            basis.append(art_start + i_art)
            i_art += 1
    return T, basis, art_start


def _phase_one(T: np.ndarray, basis: list[int], art_start: int, budget: _Budget) -> float:
    """Minimize the artificial sum; returns the residual infeasibility."""
    n_art = T.shape[1] - 1 - art_start
    if n_art == 0:
        return 0.0
    cost = np.zeros(T.shape[1] - 1)
    cost[art_start:] = 1.0
    _install_cost_row(T, basis, cost)
    outcome = _run_simplex(T, basis, budget)
    if outcome != "optimal":  # artificial sum is bounded below by zero
        raise SolverFailure("phase one reported unbounded; solver invariant broken")
    return -T[-1, -1]


def _drop_artificials(T: np.ndarray, basis: list[int], art_start: int):
    """Pivot artificials out of the basis, drop redundant rows and columns."""
    m = T.shape[0] - 1
    drop_rows = []
    for i in range(m):
        if basis[i] >= art_start:
            candidates = np.flatnonzero(np.abs(T[i, :art_start]) > _PIVOT_EPS)
            if candidates.size:
                _pivot(T, basis, i, int(candidates[0]))
            else:
                drop_rows.append(i)  # all-zero structural row: redundant
    if drop_rows:
        T = np.delete(T, drop_rows, axis=0)
        keep = [bv for i, bv in enumerate(basis) if i not in set(drop_rows)]
        basis = keep
    T = T[:, list(range(art_start)) + [T.shape[1] - 1]]
    return np.ascontiguousarray(T), basis


def _point_from_tableau(T: np.ndarray, basis: list[int], width: int) -> np.ndarray:
    y = np.zeros(width)
    for i, bv in enumerate(basis):
        y[bv] = T[i, -1]
    return y


def _verify_solution(problem: LpProblem, x: np.ndarray, eps: float) -> None:
    lhs = problem.rows @ x
    for i, rel in enumerate(problem.relations):
        r = lhs[i] - problem.rhs[i]
        bad = (rel == LE and r > eps) or (rel == GE and r < -eps) or (rel == EQ and abs(r) > eps)
        if bad:
            raise SolverFailure(
                f"returned point violates constraint {i} ({rel} residual {r:.3e})"
            )
    for j, (lo, hi) in enumerate(problem.bounds):
        if lo is not None and x[j] < lo - eps:
            raise SolverFailure(f"returned point violates lower bound on variable {j}")
        if hi is not None and x[j] > hi + eps:
            raise SolverFailure(f"returned point violates upper bound on variable {j}")


def solve_lp(problem: LpProblem, tol: SolverTolerances | None = None) -> LpResult:
    """Solve the LP; deterministic for a fixed problem.

    Raises SolverFailure when the pivot budget runs out, which is reported
    distinctly from infeasibility.
    """
    tol = tol if tol is not None else DEFAULT_TOLERANCES
    A, rels, b, c, S, t = _standardize(problem)
    budget = _Budget(ITERATION_CAP_FACTOR * (problem.n_constraints + problem.n_variables))
    T, basis, art_start = _build_tableau(A, rels, b)
    residual = _phase_one(T, basis, art_start, budget)
    if residual > tol.eps_feas:
        return LpResult(LpStatus.INFEASIBLE, None, None, budget.used)
    T, basis = _drop_artificials(T, basis, art_start)
    cost = np.zeros(T.shape[1] - 1)
    cost[: S.shape[1]] = c
    _install_cost_row(T, basis, cost)
    outcome = _run_simplex(T, basis, budget)
    if outcome == "unbounded":
        return LpResult(LpStatus.UNBOUNDED, None, None, budget.used)
    y = _point_from_tableau(T, basis, art_start)
    x = S @ y[: S.shape[1]] + t
    _verify_solution(problem, x, tol.eps_feas)
    value = float(problem.objective @ x)
    x.flags.writeable = False
    return LpResult(LpStatus.OPTIMAL, value, x, budget.used)


def check_feasible(problem: LpProblem, tol: SolverTolerances | None = None) -> bool:
    """Phase-one feasibility test; the objective is ignored."""
    tol = tol if tol is not None else DEFAULT_TOLERANCES
    A, rels, b, _, _, _ = _standardize(problem)
    budget = _Budget(ITERATION_CAP_FACTOR * (problem.n_constraints + problem.n_variables))
    T, basis, art_start = _build_tableau(A, rels, b)
    residual = _phase_one(T, basis, art_start, budget)
    return bool(residual <= tol.eps_feas)
