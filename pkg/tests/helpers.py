"""Shared generators and independent oracles for the test suite.

Oracles deliberately avoid the package's own numerics: eigenvalues come
from numpy.linalg (LAPACK) and optimization answers from enumeration,
grid refinement, or bisection, so every comparison is a genuine
cross-check of two independent routes.
"""
from __future__ import annotations

import itertools

import numpy as np

import pinlock as pl


def random_connected_topology(rng: np.random.Generator, n: int) -> pl.Topology:
    """Random spanning tree plus a few extra edges."""
    edges = set()
    order = rng.permutation(n) + 1
    for idx in range(1, n):
        j = order[idx]
        i = order[rng.integers(0, idx)]
        edges.add((min(i, j), max(i, j)))
    extra = rng.integers(0, n)
    for _ in range(extra):
        i, j = rng.choice(n, size=2, replace=False) + 1
        edges.add((min(i, j), max(i, j)))
    return pl.Topology(n, [(int(a), int(b)) for a, b in edges])


def np_lambda_max(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(m)[-1])


def threshold_dynamics(threshold: float) -> pl.NodeDynamics:
    """Scalar dynamics whose sync threshold equals the given value."""
    return pl.NodeDynamics(jf=np.array([[-threshold]]), a_g=1.0, b_g=0.0, c=1.0)


def brute_force_bip(a: np.ndarray, v: np.ndarray, scale: float,
                    threshold: float, selectable: np.ndarray | None = None):
    """Exhaustive optimum of the binary selection problem.

    Returns (cost, beta) or (None, None) when no subset is feasible.
    """
    n = a.shape[0]
    mask = np.ones(n, dtype=bool) if selectable is None else selectable
    idx = np.where(mask)[0]
    best_cost, best_beta = None, None
    for bits in itertools.product((0.0, 1.0), repeat=len(idx)):
        beta = np.zeros(n)
        beta[idx] = bits
        if np_lambda_max(a - scale * np.diag(beta)) <= threshold:
            cost = float(v @ beta)
            if best_cost is None or cost < best_cost - 1e-12:
                best_cost, best_beta = cost, beta
    return best_cost, best_beta


def _min_feasible_gain(a: np.ndarray, base: np.ndarray, j: int,
                       threshold: float, cap: float = 1e6) -> float | None:
    """Smallest beta_j >= 0 with lambda_max(a - diag(base + beta_j e_j)) <= threshold."""
    d = np.diag(base)
    if np_lambda_max(a - d) <= threshold:
        return 0.0
    e = np.zeros(a.shape[0])
    e[j] = 1.0
    if np_lambda_max(a - d - cap * np.diag(e)) > threshold:
        return None
    lo, hi = 0.0, cap
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np_lambda_max(a - d - mid * np.diag(e)) <= threshold:
            hi = mid
        else:
            lo = mid
    return hi


def support_oracle(a: np.ndarray, v: np.ndarray, threshold: float,
                   support: tuple[int, ...], cap: float = 1e6):
    """Grid-refined optimum of the free design restricted to a support.

    Supports of size 1 use bisection; size 2 use a vectorised
    grid-over-beta_i with bisection for beta_j, zoomed five times.
    Returns (cost, beta) or (None, None) if the support is infeasible.
    """
    n = a.shape[0]
    full = np.zeros(n)
    for j in support:
        full[j] = cap
    if np_lambda_max(a - np.diag(full)) > threshold:
        return None, None

    if len(support) == 1:
        (j,) = support
        b = _min_feasible_gain(a, np.zeros(n), j, threshold, cap)
        beta = np.zeros(n)
        beta[j] = b
        return float(v @ beta), beta

    i, j = support
    ei = np.zeros(n)
    ei[i] = 1.0
    ej = np.zeros(n)
    ej[j] = 1.0
    hi_i = _min_feasible_gain(a, np.zeros(n), i, threshold, cap)
    if hi_i is None:
        # pure-i is infeasible; grow the sweep range until its endpoint
        # admits a feasible beta_j
        hi_i = 2.0 * (abs(threshold) + 2.0 * abs(a.min()) + 2.0)
        while hi_i < cap and np_lambda_max(
                a - hi_i * np.diag(ei) - cap * np.diag(ej)) > threshold:
            hi_i *= 4.0
    lo, hi = 0.0, float(hi_i)
    best = (np.inf, None)
    for _ in range(5):
        grid = np.linspace(lo, hi, 41)
        # vectorised bisection for the minimal beta_j at every grid point
        mats = a[None, :, :] - grid[:, None, None] * np.diag(
            np.eye(n)[i])[None, :, :]
        blo = np.zeros_like(grid)
        bhi = np.full_like(grid, cap)
        feas = np.linalg.eigvalsh(
            mats - cap * np.diag(ej)[None, :, :])[:, -1] <= threshold
        for _ in range(60):
            mid = 0.5 * (blo + bhi)
            lam = np.linalg.eigvalsh(mats - mid[:, None, None] * np.diag(ej))[:, -1]
            ok = lam <= threshold
            bhi = np.where(ok, mid, bhi)
            blo = np.where(ok, blo, mid)
        bj = np.where(feas, bhi, np.nan)
        costs = v[i] * grid + v[j] * bj
        k = int(np.nanargmin(costs))
        if costs[k] < best[0]:
            beta = np.zeros(n)
            beta[i], beta[j] = grid[k], bj[k]
            best = (float(costs[k]), beta)
        width = (hi - lo) / 40.0
        lo = max(0.0, grid[k] - 2.0 * width)
        hi = grid[k] + 2.0 * width
    return best


def cardinality_oracle(a: np.ndarray, v: np.ndarray, threshold: float,
                       n_total: int, selectable: np.ndarray | None = None):
    """Enumerate all supports of size <= n_total; refine each one."""
    n = a.shape[0]
    mask = np.ones(n, dtype=bool) if selectable is None else selectable
    idx = [int(i) for i in np.where(mask)[0]]
    best = (None, None)
    if np_lambda_max(a) <= threshold:
        return 0.0, np.zeros(n)
    for size in range(1, n_total + 1):
        for support in itertools.combinations(idx, size):
            cost, beta = support_oracle(a, v, threshold, support)
            if cost is not None and (best[0] is None or cost < best[0]):
                best = (cost, beta)
    return best


def random_feasible_lp(rng: np.random.Generator):
    """A random LP guaranteed feasible: constraints are anchored at a
    sampled nonnegative point, and costs are nonnegative so the problem
    is also bounded."""
    n = int(rng.integers(2, 6))
    m = int(rng.integers(1, 5))
    x0 = rng.uniform(0.0, 3.0, size=n)
    c = rng.uniform(0.05, 2.0, size=n)
    rows = []
    for _ in range(m):
        coeffs = rng.uniform(-2.0, 2.0, size=n)
        val = float(coeffs @ x0)
        rel = rng.choice(["<=", ">=", "="])
        slack = float(rng.uniform(0.0, 1.5))
        if rel == "<=":
            rows.append((coeffs, "<=", val + slack))
        elif rel == ">=":
            rows.append((coeffs, ">=", val - slack))
        else:
            rows.append((coeffs, "=", val))
    return pl.LinearProgram(c, tuple(rows))


def check_duality(lp: pl.LinearProgram, sol) -> float:
    """Verify the dual certificate arithmetically; return the duality gap.

    For min c.x with rows a_i.x {rel} b_i and x >= 0 the dual demands
    A'y <= c, y_i >= 0 on ">=" rows, y_i <= 0 on "<=" rows, y free on
    "=" rows; strong duality gives b.y == c.x.
    """
    y = sol.duals
    assert y is not None
    b = np.array([rhs for _, _, rhs in lp.constraints])
    a = np.stack([coeffs for coeffs, _, _ in lp.constraints])
    for yi, (_, rel, _) in zip(y, lp.constraints):
        if rel == ">=":
            assert yi >= -1e-7, f"dual sign violated on >= row: {yi}"
        elif rel == "<=":
            assert yi <= 1e-7, f"dual sign violated on <= row: {yi}"
    reduced = lp.objective - a.T @ y
    assert np.all(reduced >= -1e-7), f"dual infeasibility: {reduced.min()}"
    return abs(float(b @ y) - sol.objective_value)
