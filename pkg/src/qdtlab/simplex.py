"""Dense two-phase simplex for small linear programs over free variables.

Problems are stated as: minimize c.x subject to rows (a, rel, b) with
rel in {<=, =, >=} and x unrestricted in sign.  Internally each variable is
split into a nonnegative difference, slack/surplus columns turn inequalities
into equations, and phase 1 runs on artificial columns.  Bland's smallest-
index rule is used for both entering and leaving choices, which makes every
solve deterministic and cycle-free.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

RELATIONS = ("<=", "=", ">=")

_PIVOT_TOL = 1e-9
_FEAS_TOL = 1e-7
_MAX_PIVOTS = 500_000


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """minimize objective @ x over free x, subject to lhs x (rel) rhs rowwise."""

    objective: np.ndarray
    lhs: np.ndarray
    relations: tuple[str, ...]
    rhs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=np.float64)
        a = np.atleast_2d(np.asarray(self.lhs, dtype=np.float64))
        b = np.asarray(self.rhs, dtype=np.float64)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("objective must be a nonempty vector")
        if a.shape != (b.size, c.size):
            raise ValueError(f"lhs shape {a.shape} does not match "
                             f"{b.size} rows x {c.size} variables")
        if len(self.relations) != b.size:
            raise ValueError("one relation per constraint row required")
        for rel in self.relations:
            if rel not in RELATIONS:
                raise ValueError(f"unknown relation {rel!r}")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(a))
                and np.all(np.isfinite(b))):
            raise ValueError("coefficients must be finite")
        for name, arr in (("objective", c), ("lhs", a), ("rhs", b)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "relations", tuple(self.relations))

    @property
    def num_variables(self) -> int:
        return self.objective.size

    @property
    def num_constraints(self) -> int:
        return self.rhs.size


@dataclass(frozen=True)
class LPSolution:
    status: str
    x: np.ndarray | None
    value: float | None
    pivots: int


def _bland_pivots(tab: np.ndarray, basis: np.ndarray, allowed: np.ndarray) -> tuple[str, int]:
    """Run pivots until optimal/unbounded.  Last row of tab is the cost row."""
    pivots = 0
    ncols = tab.shape[1] - 1
    while True:
        cost = tab[-1, :ncols]
        candidates = np.flatnonzero(allowed & (cost < -_PIVOT_TOL))
        if candidates.size == 0:
            return OPTIMAL, pivots
        enter = int(candidates[0])
        col = tab[:-1, enter]
        rows = np.flatnonzero(col > _PIVOT_TOL)
        if rows.size == 0:
            return UNBOUNDED, pivots
        ratios = tab[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12]
        leave = int(ties[np.argmin(basis[ties])])
        _pivot(tab, leave, enter)
        basis[leave] = enter
        pivots += 1
        if pivots > _MAX_PIVOTS:
            raise RuntimeError("simplex pivot guard tripped; "
                               "Bland's rule should not cycle")


def _pivot(tab: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    factors = tab[:, col].copy()
    factors[row] = 0.0
    tab -= np.outer(factors, tab[row])
    tab[:, col] = 0.0
    tab[row, col] = 1.0


def _install_cost_row(tab: np.ndarray, basis: np.ndarray, cost: np.ndarray) -> None:
    tab[-1, :] = 0.0
    tab[-1, :cost.size] = cost
    for i, var in enumerate(basis):
        if abs(tab[-1, var]) > 0.0:
            tab[-1] -= tab[-1, var] * tab[i]


def solve(lp: LinearProgram) -> LPSolution:
    """Exact-optimum solve via two-phase simplex; deterministic for a given LP."""
    nv = lp.num_variables
    a = np.array(lp.lhs)
    b = np.array(lp.rhs)
    rels = list(lp.relations)
    # b >= 0 canonical form
    for i in np.flatnonzero(b < 0):
        a[i] *= -1.0
        b[i] *= -1.0
        rels[i] = {"<=": ">=", ">=": "<=", "=": "="}[rels[i]]

    m = b.size
    split = np.hstack([a, -a])  # x = u - v with u, v >= 0
    ineq_rows = [i for i, rel in enumerate(rels) if rel != "="]
    slack = np.zeros((m, len(ineq_rows)))
    for j, i in enumerate(ineq_rows):
        slack[i, j] = 1.0 if rels[i] == "<=" else -1.0
    n_slack = len(ineq_rows)
    n_core = 2 * nv + n_slack

    # artificial columns: one per row lacking a ready basic column
    basis = np.full(m, -1, dtype=np.int64)
    for j, i in enumerate(ineq_rows):
        if rels[i] == "<=":
            basis[i] = 2 * nv + j
    art_rows = np.flatnonzero(basis < 0)
    art = np.zeros((m, art_rows.size))
    for j, i in enumerate(art_rows):
        art[i, j] = 1.0
        basis[i] = n_core + j
    ncols = n_core + art_rows.size

    tab = np.zeros((m + 1, ncols + 1))
    tab[:m, :2 * nv] = split
    tab[:m, 2 * nv:n_core] = slack
    tab[:m, n_core:ncols] = art
    tab[:m, -1] = b

    total_pivots = 0
    allowed = np.ones(ncols, dtype=bool)
    if art_rows.size:
        phase1_cost = np.zeros(ncols)
        phase1_cost[n_core:] = 1.0
        _install_cost_row(tab, basis, phase1_cost)
        status, pivots = _bland_pivots(tab, basis, allowed)
        total_pivots += pivots
        if status != OPTIMAL:
            raise RuntimeError("phase 1 cannot be unbounded")
        if -tab[-1, -1] > _FEAS_TOL:
            return LPSolution(INFEASIBLE, None, None, total_pivots)
        # drive leftover artificial variables out of the basis
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] < n_core:
                continue
            candidates = np.flatnonzero(np.abs(tab[i, :n_core]) > _PIVOT_TOL)
            if candidates.size:
                _pivot(tab, i, int(candidates[0]))
                basis[i] = int(candidates[0])
                total_pivots += 1
            else:
                keep[i] = False  # redundant row
        if not keep.all():
            tab = np.vstack([tab[:m][keep], tab[-1][None, :]])
            basis = basis[keep]
            m = int(keep.sum())

    allowed[n_core:] = False
    phase2_cost = np.zeros(ncols)
    phase2_cost[:nv] = lp.objective
    phase2_cost[nv:2 * nv] = -lp.objective
    _install_cost_row(tab, basis, phase2_cost)
    status, pivots = _bland_pivots(tab, basis, allowed)
    total_pivots += pivots
    if status == UNBOUNDED:
        return LPSolution(UNBOUNDED, None, None, total_pivots)

    full = np.zeros(ncols)
    full[basis] = tab[:m, -1]
    x = full[:nv] - full[nv:2 * nv]
    return LPSolution(OPTIMAL, x, float(lp.objective @ x), total_pivots)
