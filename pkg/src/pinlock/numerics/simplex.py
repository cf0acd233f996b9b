"""Two-phase dense-tableau simplex with Bland's anti-cycling rule.

Problem sizes in this package are tiny (at most a few hundred rows from
attack enumerations and cutting planes), so a dense tableau is the right
tool: no factorisation updates, no sparsity bookkeeping, and Bland's rule
gives guaranteed termination.

General bounds are handled in a presolve step: fixed variables are
substituted out, finite lower bounds are shifted to zero, free variables
are split into positive parts, and finite upper bounds become explicit
rows. Duals for the original constraint rows are read off the artificial
columns of the final tableau.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError, NumericalError
from ..tolerances import DEFAULT, Tolerances

__all__ = [
    "LinearProgram", "LpSolution", "solve_lp",
    "OPTIMAL", "INFEASIBLE", "UNBOUNDED",
]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_RELATIONS = ("<=", ">=", "=")

Bound = tuple[float | None, float | None]


@dataclass(frozen=True)
class LinearProgram:
    """min objective . x  subject to rows (coeffs, relation, rhs) and box bounds.

    ``bounds[j] = (lo, hi)`` with ``None`` meaning unbounded on that side;
    the default is ``(0, None)`` for every variable.
    """

    objective: np.ndarray
    constraints: tuple[tuple[np.ndarray, str, float], ...]
    bounds: tuple[Bound, ...] = ()

    def __post_init__(self) -> None:
        c = np.asarray(self.objective, dtype=float)
        if c.ndim != 1:
            raise InputError("objective must be a vector")
        if not np.all(np.isfinite(c)):
            raise InputError("objective must be finite")
        rows = []
        for coeffs, rel, rhs in self.constraints:
            a = np.asarray(coeffs, dtype=float)
            if a.shape != c.shape:
                raise InputError(
                    f"constraint row has {a.shape[0] if a.ndim == 1 else '?'} "
                    f"coefficients, expected {c.shape[0]}"
                )
            if rel not in _RELATIONS:
                raise InputError(f"unknown relation {rel!r}")
            rhs = float(rhs)
            if not np.isfinite(rhs) or not np.all(np.isfinite(a)):
                raise InputError("constraint data must be finite")
            rows.append((a, rel, rhs))
        bounds = self.bounds if self.bounds else tuple((0.0, None) for _ in c)
        if len(bounds) != c.shape[0]:
            raise InputError("bounds length must match variable count")
        norm = []
        for lo, hi in bounds:
            lo = None if lo is None else float(lo)
            hi = None if hi is None else float(hi)
            if lo is not None and hi is not None and lo > hi:
                raise InputError(f"empty bound interval ({lo}, {hi})")
            norm.append((lo, hi))
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraints", tuple(rows))
        object.__setattr__(self, "bounds", tuple(norm))

    @property
    def n_vars(self) -> int:
        return self.objective.shape[0]


@dataclass(frozen=True)
class LpSolution:
    status: str
    x: np.ndarray | None = None
    objective_value: float | None = None
    # dual value per original constraint row (only when status == OPTIMAL);
    # sign convention: >= rows have nonnegative duals, <= rows nonpositive
    duals: np.ndarray | None = None
    iterations: int = 0


@dataclass
class _Standard:
    """Standard-form data: min c.y  s.t. A y {rel} b, y >= 0, plus the map back."""

    a: np.ndarray
    rels: list[str]
    b: np.ndarray
    c: np.ndarray
    n_orig_rows: int
    # x_orig[j] = offset[j] + sum over (col, sign) of sign * y[col]
    offsets: np.ndarray
    cols: list[list[tuple[int, float]]]
    row_sign: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _standardise(lp: LinearProgram) -> _Standard:
    n = lp.n_vars
    offsets = np.zeros(n)
    cols: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    ncols = 0
    extra_rows: list[tuple[np.ndarray, str, float]] = []

    col_expr: list[list[tuple[int, float]]] = []
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo is not None and hi is not None and lo == hi:
            offsets[j] = lo  # fixed variable, substituted out
            col_expr.append([])
            continue
        if lo is None:
            # free (or upper-bounded only): split x = p - m
            p, m = ncols, ncols + 1
            ncols += 2
            col_expr.append([(p, 1.0), (m, -1.0)])
            if hi is not None:
                row = np.zeros(n)
                row[j] = 1.0
                extra_rows.append((row, "<=", hi))
        else:
            col_expr.append([(ncols, 1.0)])
            offsets[j] = lo
            if hi is not None:
                row = np.zeros(n)
                row[j] = 1.0
                extra_rows.append((row, "<=", hi))
            ncols += 1
    for j in range(n):
        cols[j] = col_expr[j]

    all_rows = list(lp.constraints) + extra_rows
    m_rows = len(all_rows)
    a = np.zeros((m_rows, ncols))
    b = np.zeros(m_rows)
    rels = []
    for i, (coeffs, rel, rhs) in enumerate(all_rows):
        shift = float(coeffs @ offsets)
        b[i] = rhs - shift
        rels.append(rel)
        for j in range(n):
            cj = coeffs[j]
            if cj == 0.0:
                continue
            for col, sign in cols[j]:
                a[i, col] += sign * cj

    c = np.zeros(ncols)
    for j in range(n):
        for col, sign in cols[j]:
            c[col] += sign * lp.objective[j]

    return _Standard(a=a, rels=rels, b=b, c=c,
                     n_orig_rows=len(lp.constraints), offsets=offsets, cols=cols)


def _pivot(t: np.ndarray, row: int, col: int) -> None:
    t[row, :] /= t[row, col]
    factors = t[:, col].copy()
    factors[row] = 0.0
    t -= np.outer(factors, t[row, :])


def _bland_enter(obj_row: np.ndarray, allowed: np.ndarray, eps: float) -> int:
    for j in range(obj_row.shape[0] - 1):
        if allowed[j] and obj_row[j] < -eps:
            return j
    return -1


def _ratio_leave(t: np.ndarray, col: int, basis: list[int], eps: float) -> int:
    best = -1
    best_ratio = np.inf
    for i in range(t.shape[0] - 1):
        a = t[i, col]
        if a > eps:
            ratio = t[i, -1] / a
            if ratio < best_ratio - 1e-12 or (
                abs(ratio - best_ratio) <= 1e-12 and (best < 0 or basis[i] < basis[best])
            ):
                best_ratio = ratio
                best = i
    return best


def _run_simplex(t: np.ndarray, basis: list[int], allowed: np.ndarray,
                 eps: float, cap: int) -> tuple[str, int]:
    it = 0
    while True:
        j = _bland_enter(t[-1, :], allowed, eps)
        if j < 0:
            return OPTIMAL, it
        i = _ratio_leave(t, j, basis, eps)
        if i < 0:
            return UNBOUNDED, it
        _pivot(t, i, j)
        basis[i] = j
        it += 1
        if it > cap:
            raise NumericalError(f"simplex exceeded {cap} pivots")


def solve_lp(lp: LinearProgram, tol: Tolerances = DEFAULT) -> LpSolution:
    """Solve a LinearProgram. Statuses: optimal, infeasible, unbounded."""
    std = _standardise(lp)
    m, ncols = std.a.shape

    if m == 0:
        # box-only problem: each variable sits at its cheapest finite bound
        x = np.zeros(lp.n_vars)
        for j, (lo, hi) in enumerate(lp.bounds):
            cj = lp.objective[j]
            if cj > 0.0:
                if lo is None:
                    return LpSolution(UNBOUNDED)
                x[j] = lo
            elif cj < 0.0:
                if hi is None:
                    return LpSolution(UNBOUNDED)
                x[j] = hi
            else:
                x[j] = lp.bounds[j][0] if lo is not None else 0.0
        return LpSolution(OPTIMAL, x, float(lp.objective @ x), np.zeros(0))

    a = std.a.copy()
    b = std.b.copy()
    row_sign = np.ones(m)
    for i in range(m):
        if b[i] < 0.0:
            a[i, :] *= -1.0
            b[i] *= -1.0
            row_sign[i] = -1.0
            std.rels[i] = {"<=": ">=", ">=": "<=", "=": "="}[std.rels[i]]

    n_slack = sum(1 for r in std.rels if r == "<=")
    n_surp = sum(1 for r in std.rels if r == ">=")
    slack0 = ncols
    surp0 = ncols + n_slack
    art0 = ncols + n_slack + n_surp
    total = art0 + m  # one artificial per row keeps dual extraction uniform

    t = np.zeros((m + 1, total + 1))
    t[:m, :ncols] = a
    t[:m, -1] = b
    basis: list[int] = []
    si = ti = 0
    for i in range(m):
        if std.rels[i] == "<=":
            t[i, slack0 + si] = 1.0
            si += 1
        elif std.rels[i] == ">=":
            t[i, surp0 + ti] = -1.0
            ti += 1
        t[i, art0 + i] = 1.0
        basis.append(art0 + i)

    eps = tol.lp_pivot
    cap = 2000 + 200 * (m + total)

    # phase 1: min sum of artificials; reduced costs = c1 - colsums over rows
    t[-1, :] = 0.0
    t[-1, art0:art0 + m] = 1.0
    for i in range(m):
        t[-1, :] -= t[i, :]
    allowed = np.ones(total, dtype=bool)
    status, it1 = _run_simplex(t, basis, allowed, eps, cap)
    if status != OPTIMAL:
        raise NumericalError("phase-1 simplex reported unbounded, which is impossible")
    phase1_obj = -t[-1, -1]
    if phase1_obj > tol.lp_feasibility:
        return LpSolution(INFEASIBLE, iterations=it1)

    # drive any leftover artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= art0:
            for j in range(art0):
                if abs(t[i, j]) > eps:
                    _pivot(t, i, j)
                    basis[i] = j
                    break

    # phase 2: original costs; artificial columns may never re-enter
    allowed = np.ones(total, dtype=bool)
    allowed[art0:] = False
    c2 = np.zeros(total)
    c2[:ncols] = std.c
    t[-1, :-1] = c2
    t[-1, -1] = 0.0
    for i in range(m):
        cb = c2[basis[i]]
        if cb != 0.0:
            t[-1, :] -= cb * t[i, :]
    status, it2 = _run_simplex(t, basis, allowed, eps, cap)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, iterations=it1 + it2)

    y = np.zeros(total)
    for i in range(m):
        y[basis[i]] = t[i, -1]

    x = std.offsets.copy()
    for j in range(lp.n_vars):
        for col, sign in std.cols[j]:
            x[j] += sign * y[col]
    obj = float(lp.objective @ x)

    # duals: phase-2 artificial reduced cost is -c_B B^{-1} e_i
    duals = np.array([
        -t[-1, art0 + i] * row_sign[i] for i in range(std.n_orig_rows)
    ])

    _check_primal(lp, x, tol)
    return LpSolution(OPTIMAL, x, obj, duals, iterations=it1 + it2)


def _check_primal(lp: LinearProgram, x: np.ndarray, tol: Tolerances) -> None:
    slack_tol = max(tol.lp_feasibility, 1e-9 * (1.0 + float(np.abs(x).max(initial=0.0))))
    for coeffs, rel, rhs in lp.constraints:
        v = float(coeffs @ x)
        ok = (
            v <= rhs + slack_tol if rel == "<=" else
            v >= rhs - slack_tol if rel == ">=" else
            abs(v - rhs) <= slack_tol
        )
        if not ok:
            raise NumericalError(
                f"simplex returned an infeasible point: row {rel} {rhs} got {v}"
            )
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo is not None and x[j] < lo - slack_tol:
            raise NumericalError(f"bound violation on variable {j}")
        if hi is not None and x[j] > hi + slack_tol:
            raise NumericalError(f"bound violation on variable {j}")
