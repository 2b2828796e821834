"""Dense two-phase tableau simplex for desk-scale linear programs.

Pivoting uses Dantzig's largest-reduced-cost rule and switches permanently
to Bland's rule once ``3 * (m + n)`` degenerate pivots have been taken.
After termination the basic solution is re-solved from the original data,
which removes most of the drift accumulated in the tableau.
"""
from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import MalformedInput, NumericalFailure

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

RELATIONS = ("<=", "=", ">=")

REDUCED_COST_TOL = 1e-10
PIVOT_TOL = 1e-12
FEASIBILITY_TOL = 1e-8

_recorder: contextvars.ContextVar[Optional[list]] = contextvars.ContextVar(
    "lp_recorder", default=None)


@dataclass(frozen=True)
class Constraint:
    row: tuple
    relation: str
    rhs: float

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise MalformedInput(f"unknown relation {self.relation!r}")
        object.__setattr__(self, "row", tuple(float(a) for a in self.row))
        object.__setattr__(self, "rhs", float(self.rhs))


@dataclass
class LinearProgram:
    """Maximize ``objective @ x`` subject to row constraints and bounds.

    ``bounds`` holds one ``(lower, upper)`` pair per variable, ``None``
    meaning unbounded on that side. The default for every variable is
    ``(0, None)``.
    """

    objective: Sequence[float]
    constraints: list = field(default_factory=list)
    bounds: Optional[list] = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        n = self.objective.shape[0]
        if n < 1:
            raise MalformedInput("a linear program needs at least one variable")
        self.constraints = [c if isinstance(c, Constraint) else Constraint(*c)
                            for c in self.constraints]
        for c in self.constraints:
            if len(c.row) != n:
                raise MalformedInput(
                    f"constraint row has {len(c.row)} entries, expected {n}")
        if self.bounds is None:
            self.bounds = [(0.0, None)] * n
        if len(self.bounds) != n:
            raise MalformedInput("one (lower, upper) bound pair per variable")
        self.bounds = [(None if lo is None else float(lo),
                        None if hi is None else float(hi)) for lo, hi in self.bounds]

    @property
    def n_vars(self) -> int:
        return self.objective.shape[0]

    @classmethod
    def from_arrays(cls, c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None):
        constraints = []
        if A_ub is not None:
            constraints += [Constraint(r, "<=", b) for r, b in zip(np.atleast_2d(A_ub), b_ub)]
        if A_eq is not None:
            constraints += [Constraint(r, "=", b) for r, b in zip(np.atleast_2d(A_eq), b_eq)]
        return cls(c, constraints, bounds)

    def to_dict(self) -> dict:
        return {
            "objective": self.objective.tolist(),
            "constraints": [{"row": list(c.row), "relation": c.relation, "rhs": c.rhs}
                            for c in self.constraints],
            "bounds": [list(b) for b in self.bounds],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LinearProgram":
        return cls(data["objective"],
                   [Constraint(c["row"], c["relation"], c["rhs"]) for c in data["constraints"]],
                   [tuple(b) for b in data.get("bounds")] if data.get("bounds") else None)

    def violation(self, x) -> float:
        """Largest absolute constraint or bound violation at ``x``."""
        x = np.asarray(x, dtype=float)
        worst = 0.0
        for c in self.constraints:
            lhs = float(np.dot(c.row, x))
            if c.relation == "<=":
                worst = max(worst, lhs - c.rhs)
            elif c.relation == ">=":
                worst = max(worst, c.rhs - lhs)
            else:
                worst = max(worst, abs(lhs - c.rhs))
        for xi, (lo, hi) in zip(x, self.bounds):
            if lo is not None:
                worst = max(worst, lo - xi)
            if hi is not None:
                worst = max(worst, xi - hi)
        return worst


@dataclass(frozen=True)
class LpSolution:
    status: str
    x: np.ndarray
    objective_value: float

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


@contextlib.contextmanager
def record_lps():
    """Collect every LinearProgram solved inside the block (for ``--dump-lp``)."""
    log: list = []
    token = _recorder.set(log)
    try:
        yield log
    finally:
        _recorder.reset(token)


class _StandardForm:
    """``max c@y  s.t.  A y (rel) b, y >= 0`` plus the map ``x = T y + shift``."""

    def __init__(self, lp: LinearProgram):
        n = lp.n_vars
        cols, shift = [], np.zeros(n)
        extra_rows = []  # (column index in y, upper bound) for boxed variables
        for j, (lo, hi) in enumerate(lp.bounds):
            if lo is not None:
                shift[j] = lo
                col = np.zeros(n)
                col[j] = 1.0
                cols.append(col)
                if hi is not None:
                    extra_rows.append((len(cols) - 1, hi - lo))
            elif hi is not None:
                shift[j] = hi
                col = np.zeros(n)
                col[j] = -1.0
                cols.append(col)
            else:
                col = np.zeros(n)
                col[j] = 1.0
                cols.append(col)
                cols.append(-col)
        self.T = np.array(cols).T  # n x N
        self.shift = shift
        N = self.T.shape[1]

        rows, rels, rhs = [], [], []
        for c in lp.constraints:
            row = np.asarray(c.row)
            rows.append(row @ self.T)
            rels.append(c.relation)
            rhs.append(c.rhs - row @ shift)
        for k, ub in extra_rows:
            row = np.zeros(N)
            row[k] = 1.0
            rows.append(row)
            rels.append("<=")
            rhs.append(ub)
        self.A = np.array(rows).reshape(len(rows), N)
        self.rels = rels
        self.b = np.array(rhs, dtype=float)
        self.c = lp.objective @ self.T
        self.c0 = float(lp.objective @ shift)

    def to_x(self, y):
        return self.T @ y + self.shift


def _pivot(tab, r, e):
    tab[r] /= tab[r, e]
    col = tab[:, e].copy()
    col[r] = 0.0
    tab -= np.outer(col, tab[r])


def _run_simplex(tab, basis, cost, allowed, degenerate_limit, max_iter):
    """Optimize ``cost`` over the tableau in place.

    Returns ``OPTIMAL`` or ``UNBOUNDED``; ``tab`` and ``basis`` are updated.
    """
    ncols = tab.shape[1] - 1
    degenerate = 0
    bland = False
    for _ in range(max_iter):
        reduced = cost - cost[basis] @ tab[:, :ncols]
        reduced[~allowed] = 0.0
        reduced[basis] = 0.0
        candidates = np.flatnonzero(reduced > REDUCED_COST_TOL)
        if candidates.size == 0:
            return OPTIMAL
        e = int(candidates[0]) if bland else int(candidates[np.argmax(reduced[candidates])])
        column = tab[:, e]
        rows = np.flatnonzero(column > PIVOT_TOL)
        if rows.size == 0:
            return UNBOUNDED
        ratios = tab[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        # smallest basic variable index leaves (Bland; also a fine tie-break otherwise)
        r = int(ties[np.argmin(np.asarray(basis)[ties])])
        if best <= 1e-12:
            degenerate += 1
            if degenerate > degenerate_limit:
                bland = True
        _pivot(tab, r, e)
        basis[r] = e
        rhs = tab[:, -1]
        rhs[(rhs < 0.0) & (rhs > -1e-9)] = 0.0
    raise NumericalFailure("simplex iteration limit exceeded")


def lp_solve(lp: LinearProgram) -> LpSolution:
    """Solve ``lp`` and return a certified status and solution."""
    log = _recorder.get()
    if log is not None:
        log.append(lp.to_dict())
    sf = _StandardForm(lp)
    A, b = sf.A.copy(), sf.b.copy()
    rels = list(sf.rels)
    m, N = A.shape
    # normalize to b >= 0
    for i in range(m):
        if b[i] < 0:
            A[i] *= -1
            b[i] *= -1
            rels[i] = {"<=": ">=", ">=": "<=", "=": "="}[rels[i]]

    n_slack = sum(r != "=" for r in rels)
    n_art = sum(r != "<=" for r in rels)
    ncols = N + n_slack + n_art
    tab = np.zeros((m, ncols + 1))
    tab[:, :N] = A
    tab[:, -1] = b
    basis = [0] * m
    s = N
    a = N + n_slack
    art_cols = []
    for i, rel in enumerate(rels):
        if rel == "<=":
            tab[i, s] = 1.0
            basis[i] = s
            s += 1
        elif rel == ">=":
            tab[i, s] = -1.0
            s += 1
            tab[i, a] = 1.0
            basis[i] = a
            art_cols.append(a)
            a += 1
        else:
            tab[i, a] = 1.0
            basis[i] = a
            art_cols.append(a)
            a += 1
    A_full = tab[:, :ncols].copy()
    b_full = b.copy()

    degenerate_limit = 3 * (m + N)
    max_iter = 2000 + 50 * (m + ncols)
    allowed = np.ones(ncols, dtype=bool)

    if art_cols:
        cost1 = np.zeros(ncols)
        cost1[art_cols] = -1.0
        _run_simplex(tab, basis, cost1, allowed, degenerate_limit, max_iter)
        infeas = float(tab[:, -1][np.isin(basis, art_cols)].sum())
        if infeas > FEASIBILITY_TOL * max(1.0, float(np.abs(b).max(initial=0.0))):
            return LpSolution(INFEASIBLE, np.full(lp.n_vars, np.nan), float("nan"))
        # drive artificial variables out of the basis, dropping redundant rows
        keep = []
        is_art = np.zeros(ncols, dtype=bool)
        is_art[art_cols] = True
        for i in range(m):
            if is_art[basis[i]]:
                row = tab[i, :ncols].copy()
                row[is_art] = 0.0
                j = int(np.argmax(np.abs(row)))
                if abs(row[j]) > 1e-9:
                    _pivot(tab, i, j)
                    basis[i] = j
                    keep.append(i)
            else:
                keep.append(i)
        tab = tab[keep]
        basis = [basis[i] for i in keep]
        A_full = A_full[keep]
        b_full = b_full[keep]
        allowed = ~is_art

    cost2 = np.zeros(ncols)
    cost2[:N] = sf.c
    status = _run_simplex(tab, basis, cost2, allowed, degenerate_limit, max_iter)

    y_full = np.zeros(ncols)
    y_full[basis] = tab[:, -1]
    if status == UNBOUNDED:
        x = sf.to_x(y_full[:N])
        return LpSolution(UNBOUNDED, x, float("inf"))

    # re-solve the optimal basis from the original data
    candidates = [y_full]
    if len(basis):
        try:
            yb = np.linalg.solve(A_full[:, basis], b_full)
            refined = np.zeros(ncols)
            refined[basis] = np.maximum(yb, 0.0)
            candidates.insert(0, refined)
        except np.linalg.LinAlgError:
            pass
    for y in candidates:
        x = sf.to_x(y[:N])
        if lp.violation(x) <= FEASIBILITY_TOL:
            return LpSolution(OPTIMAL, x, float(lp.objective @ x))
    raise NumericalFailure("optimal basis violates the constraints beyond tolerance")
