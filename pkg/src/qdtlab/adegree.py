"""Approximate degree of cube functions and joint indicator families, via LP.

``min_error`` finds the best uniform error achievable by a polynomial of
bounded degree whose cube values stay in [0, 1] (a flag lifts the range
restriction).  ``family_feasible`` solves the joint problem: one nonnegative
polynomial per output value, their pointwise sum at most 1, each within 1/3
of its fiber indicator on the domain.  Undefined points constrain only
nonnegativity and the sum, never the approximation error.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boolfunc import BoolFunction, RealFunction, indicator
from .fourier import Spectrum, popcounts
from .simplex import INFEASIBLE, OPTIMAL, LinearProgram, solve

FEAS_TOL = 1e-7
APPROX_ERROR = 1.0 / 3.0
MAX_LP_ARITY = 8


def _check_lp_arity(n: int) -> None:
    if n > MAX_LP_ARITY:
        raise ValueError(f"LP-based degree computations are capped at "
                         f"n <= {MAX_LP_ARITY}, got {n}")


def character_table(n: int, max_degree: int) -> tuple[np.ndarray, np.ndarray]:
    """(masks, signs): parity masks of popcount <= max_degree and the
    2^n x len(masks) sign matrix chi_r(x)."""
    size = 1 << n
    masks = np.flatnonzero(popcounts(size) <= max_degree)
    xs = np.arange(size, dtype=np.uint64)
    parities = np.bitwise_count(xs[:, None] & masks.astype(np.uint64)[None, :]) & 1
    return masks, 1.0 - 2.0 * parities.astype(np.float64)


def _spectrum_from(masks: np.ndarray, weights: np.ndarray, n: int) -> Spectrum:
    coeffs = np.zeros(1 << n)
    coeffs[masks] = weights
    return Spectrum(n, coeffs)


def best_approximation(g: RealFunction, d: int, box: bool = True) -> tuple[float, Spectrum]:
    """Least uniform error over degree-<=d polynomials, with its witness.

    With ``box`` the polynomial is also required to stay in [0, 1] on the
    cube, matching acceptance-probability semantics; without it this is the
    classical best uniform approximation.
    """
    _check_lp_arity(g.n)
    if not 0 <= d <= g.n:
        raise ValueError(f"degree bound {d} outside 0..{g.n}")
    masks, chi = character_table(g.n, d)
    size, ncoef = chi.shape
    # variables: [coefficients, eps]
    rows, rels, rhs = [], [], []
    eps_col = np.full((size, 1), -1.0)
    rows.append(np.hstack([chi, eps_col]))
    rels += ["<="] * size
    rhs.append(g.values)
    rows.append(np.hstack([-chi, eps_col]))
    rels += ["<="] * size
    rhs.append(-g.values)
    if box:
        zero = np.zeros((size, 1))
        rows.append(np.hstack([chi, zero]))
        rels += [">="] * size
        rhs.append(np.zeros(size))
        rows.append(np.hstack([chi, zero]))
        rels += ["<="] * size
        rhs.append(np.ones(size))
    objective = np.zeros(ncoef + 1)
    objective[-1] = 1.0
    sol = solve(LinearProgram(objective, np.vstack(rows), tuple(rels), np.concatenate(rhs)))
    if sol.status != OPTIMAL:
        raise RuntimeError(f"approximation LP returned {sol.status}")
    return float(sol.x[-1]), _spectrum_from(masks, sol.x[:ncoef], g.n)


def min_error(g: RealFunction, d: int, box: bool = True) -> float:
    """Least uniform error achievable at degree <= d."""
    return best_approximation(g, d, box)[0]


def approx_degree(g: RealFunction, eps: float = APPROX_ERROR, box: bool = True) -> int:
    """Least degree whose best approximation errs at most eps, by linear scan."""
    return approx_degree_witness(g, eps, box)[0]


def approx_degree_witness(g: RealFunction, eps: float = APPROX_ERROR,
                          box: bool = True) -> tuple[int, float, Spectrum]:
    """(degree, achieved error, witness spectrum) for the eps-approximation."""
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps {eps} outside (0, 1/2)")
    for d in range(g.n + 1):
        err, witness = best_approximation(g, d, box)
        if err <= eps + FEAS_TOL:
            return d, err, witness
    raise AssertionError("exact multilinear representation must succeed at d = n")


@dataclass(frozen=True, eq=False)
class PolyFamily:
    """One bounded-degree polynomial per output value, the joint LP witness."""

    outputs: tuple[int, ...]
    polys: tuple[Spectrum, ...]
    degree_bound: int
    epsilon: float  # largest approximation error over the domain

    def value_table(self) -> np.ndarray:
        """len(outputs) x 2^n matrix of cube values."""
        return np.vstack([p.values().values for p in self.polys])

    def max_violation(self, f: BoolFunction) -> dict[str, float]:
        """Worst-case slack of each family constraint, re-evaluated pointwise."""
        table = self.value_table()
        approx_err = 0.0
        for row, y in enumerate(self.outputs):
            fiber = indicator(f, y).values[f.domain_mask]
            approx_err = max(approx_err, float(
                np.max(np.abs(table[row][f.domain_mask] - fiber))))
        return {
            "negativity": max(0.0, float(-table.min())),
            "excess_over_one": max(0.0, float(table.max() - 1.0)),
            "sum_over_one": max(0.0, float(table.sum(axis=0).max() - 1.0)),
            "approx_error_over_third": max(0.0, approx_err - APPROX_ERROR),
        }

    def to_json_dict(self) -> dict:
        return {
            "degree": self.degree_bound,
            "epsilon": self.epsilon,
            "polys": [
                {"y": y,
                 "coeffs": [[int(r), float(c)] for r, c in
                            zip(np.flatnonzero(p.coeffs), p.coeffs[np.flatnonzero(p.coeffs)])]}
                for y, p in zip(self.outputs, self.polys)
            ],
        }


def family_feasible(f: BoolFunction, d: int) -> PolyFamily | None:
    """Joint witness of degree <= d, or None when no family exists.

    Minimizes the uniform approximation error over families that are
    pointwise nonnegative and sum to at most 1; feasibility means the
    optimal error is at most 1/3.
    """
    _check_lp_arity(f.n)
    if not 0 <= d <= f.n:
        raise ValueError(f"degree bound {d} outside 0..{f.n}")
    ys = [int(y) for y in f.image()]
    masks, chi = character_table(f.n, d)
    size, ncoef = chi.shape
    nvars = len(ys) * ncoef + 1
    eps_ix = nvars - 1
    dom = np.flatnonzero(f.domain_mask)

    rows, rels, rhs = [], [], []

    def block(row_chi: np.ndarray, y_pos: int) -> np.ndarray:
        out = np.zeros((row_chi.shape[0], nvars))
        out[:, y_pos * ncoef:(y_pos + 1) * ncoef] = row_chi
        return out

    for pos, y in enumerate(ys):
        rows.append(block(chi, pos))  # nonnegativity everywhere
        rels += [">="] * size
        rhs.append(np.zeros(size))
        fiber = indicator(f, y).values[dom]
        upper = block(chi[dom], pos)
        upper[:, eps_ix] = -1.0
        rows.append(upper)  # f~_y(x) - f_y(x) <= eps on the domain
        rels += ["<="] * dom.size
        rhs.append(fiber)
        lower = block(-chi[dom], pos)
        lower[:, eps_ix] = -1.0
        rows.append(lower)
        rels += ["<="] * dom.size
        rhs.append(-fiber)

    total = np.zeros((size, nvars))
    for pos in range(len(ys)):
        total[:, pos * ncoef:(pos + 1) * ncoef] = chi
    rows.append(total)  # sum_y f~_y(x) <= 1 everywhere
    rels += ["<="] * size
    rhs.append(np.ones(size))

    objective = np.zeros(nvars)
    objective[eps_ix] = 1.0
    sol = solve(LinearProgram(objective, np.vstack(rows), tuple(rels), np.concatenate(rhs)))
    if sol.status == INFEASIBLE:
        return None  # cannot happen: the all-zero family is feasible
    eps = float(sol.x[eps_ix])
    if eps > APPROX_ERROR + FEAS_TOL:
        return None
    polys = tuple(
        _spectrum_from(masks, sol.x[pos * ncoef:(pos + 1) * ncoef], f.n)
        for pos in range(len(ys))
    )
    return PolyFamily(tuple(ys), polys, d, eps)


def family_degree(f: BoolFunction) -> tuple[int, PolyFamily]:
    """Least d admitting a joint family, with its witness."""
    for d in range(f.n + 1):
        family = family_feasible(f, d)
        if family is not None:
            return d, family
    raise AssertionError("exact fiber indicators must be feasible at d = n")
