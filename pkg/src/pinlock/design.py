"""Pinning-design solvers.

Three entry points, one shared engine:

* ``solve_free`` — minimum-cost gains over a selectable node set, subject
  to ``lambda_max(A - diag(beta)) <= threshold``. Solved by Kelley cutting
  planes: each iterate's top eigenpair (lam, u) of ``A - s*diag(beta)``
  yields the valid cut ``u'Au - s * sum_i u_i^2 beta_i <= threshold``
  (valid for every feasible beta by the Rayleigh-quotient inequality),
  which is added to an LP master until the violation drops below
  tolerance.
* ``solve_identical_bip`` — binary node selection at an identical gain
  ratio, solved exactly by branch and bound over the [0,1] relaxation.
* ``solve_cardinality`` — gain design with at most ``n_total`` pinned
  nodes, solved exactly by branch and bound over sparsity patterns.

Cuts are valid globally (they do not depend on variable fixings), so both
branch-and-bound solvers share one cut pool across their whole tree.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NumericalError
from .network import CouplingMatrix, Topology, is_connected
from .numerics import (
    INFEASIBLE,
    OPTIMAL,
    LinearProgram,
    SymMatrix,
    lambda_max,
    solve_lp,
    symmetric_eigen,
)
from .sync import NodeDynamics, PinningScheme, sync_threshold
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "DesignProblem", "DesignSolution",
    "solve_free", "solve_identical_bip", "solve_cardinality",
    "TOLERANCE_REACHED",
]

TOLERANCE_REACHED = "tolerance-reached"


@dataclass(frozen=True)
class DesignProblem:
    """One pinning-design instance.

    ``selectable`` holds 1-based node ids allowed to carry a controller
    (default: all nodes). ``gain_ratio`` is the identical-gain ratio used
    by ``solve_identical_bip``; ``n_total`` caps the number of pinned
    nodes for ``solve_cardinality``.
    """

    a: CouplingMatrix
    v: np.ndarray
    dyn: NodeDynamics
    selectable: frozenset[int] | None = None
    gain_ratio: float = 1.0
    n_total: int | None = None

    def __post_init__(self) -> None:
        v = np.array(self.v, dtype=float)
        if v.shape != (self.a.n,):
            raise InputError(f"cost vector must have length {self.a.n}")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise InputError("pinning cost coefficients must be positive")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)
        if self.selectable is not None:
            sel = frozenset(int(i) for i in self.selectable)
            if not sel:
                raise InputError("selectable set must not be empty")
            bad = [i for i in sel if not 1 <= i <= self.a.n]
            if bad:
                raise InputError(f"selectable nodes {bad} outside 1..{self.a.n}")
            object.__setattr__(self, "selectable", sel)
        if not self.gain_ratio > 0:
            raise InputError("gain_ratio must be positive")
        if self.n_total is not None and not 0 <= self.n_total <= self.a.n:
            raise InputError(f"n_total must lie in 0..{self.a.n}")

    def selectable_mask(self) -> np.ndarray:
        if self.selectable is None:
            return np.ones(self.a.n, dtype=bool)
        mask = np.zeros(self.a.n, dtype=bool)
        for i in self.selectable:
            mask[i - 1] = True
        return mask


@dataclass(frozen=True)
class DesignSolution:
    status: str                      # optimal | infeasible | tolerance-reached
    threshold: float
    beta: np.ndarray | None = None
    selected: np.ndarray | None = None   # binary d, d_i = 1 iff beta_i > 0
    gains: np.ndarray | None = None      # per-node control gain c_i
    total_cost: float | None = None
    mu_max: float | None = None          # lambda_max at the returned scheme
    cuts: int = 0
    nodes: int = 0                       # branch-and-bound nodes visited
    message: str = ""


def _require_connected(a: CouplingMatrix) -> None:
    off = a.entries - np.diag(np.diag(a.entries))
    edges = [(i + 1, j + 1) for i in range(a.n) for j in range(i + 1, a.n)
             if off[i, j] != 0.0]
    if not is_connected(Topology(a.n, edges)):
        raise InputError("design requires a connected network")


def _eigen_cuts(a_entries: np.ndarray, scale: float, beta: np.ndarray,
                threshold: float, tol: Tolerances) -> tuple[float, list[np.ndarray]]:
    """Separation step: top eigenvalue of A - scale*diag(beta) plus the
    eigenvectors of every eigenvalue above the threshold (each one yields a
    valid Rayleigh cut; cutting all violated directions at once avoids the
    slow crawl Kelley exhibits when the top eigenvalue is degenerate)."""
    spec = symmetric_eigen(SymMatrix(a_entries - scale * np.diag(beta)), tol)
    lam = float(spec.eigenvalues[-1])
    cuts = [
        spec.eigenvectors[:, i].copy()
        for i in range(spec.eigenvalues.shape[0])
        if spec.eigenvalues[i] > threshold + tol.cut_violation
    ]
    return lam, cuts


class _CutPool:
    """Shared pool of Kelley cuts sum_i scale*u_i^2*beta_i >= u'Au - threshold.

    Cuts are valid for every beta >= 0 (Rayleigh-quotient inequality), so
    they can be reused across an entire branch-and-bound tree. The shared
    tail is kept bounded: master LPs must stay small, and any subset of
    valid cuts still yields valid lower bounds.
    """

    MAX_SHARED = 48

    def __init__(self, a_entries: np.ndarray, scale: float, threshold: float):
        self.a = a_entries
        self.scale = scale
        self.threshold = threshold
        self.coeffs: list[np.ndarray] = []
        self.rhs: list[float] = []
        self.total = 0

    def cut_from(self, u: np.ndarray) -> tuple[np.ndarray, float]:
        return self.scale * u * u, float(u @ self.a @ u) - self.threshold

    def snapshot(self) -> tuple[list[np.ndarray], list[float]]:
        return list(self.coeffs), list(self.rhs)

    def publish(self, coeffs: list[np.ndarray], rhs: list[float]) -> None:
        self.total += len(coeffs)
        self.coeffs.extend(coeffs)
        self.rhs.extend(rhs)
        if len(self.coeffs) > self.MAX_SHARED:
            self.coeffs = self.coeffs[-self.MAX_SHARED:]
            self.rhs = self.rhs[-self.MAX_SHARED:]

    def __len__(self) -> int:
        return self.total


@dataclass
class _Master:
    """Kelley relaxation over a box, with optional per-node fixings.

    The plain cutting-plane loop converges sublinearly near the optimum
    (the eigenvalue surface is nonsmooth), so each iteration additionally
    adds a deep cut at the constraint boundary along the segment from the
    master optimum to the box's upper corner. That corner is the most
    pinned point of the box, so by eigenvalue monotonicity it is feasible
    whenever anything in the box is, which also yields an exact
    infeasibility test before any LP is solved.
    """

    pool: _CutPool
    v: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    tol: Tolerances
    max_iters: int | None = None   # per-call budget; None means the global cut limit
    cuts_added: int = 0

    def _lam_u(self, beta: np.ndarray) -> tuple[float, np.ndarray]:
        return lambda_max(
            SymMatrix(self.pool.a - self.pool.scale * np.diag(beta)), self.tol
        )

    def solve(self) -> tuple[str, np.ndarray | None, float]:
        """Iterate master LP + eigen separation to convergence.

        Returns (status, beta, cost). On OPTIMAL the returned cost is the
        final master objective, a valid lower bound for the exact optimum
        of this relaxation, and beta satisfies the eigenvalue constraint
        to within ``cut_violation``. On TOLERANCE_REACHED the cost is still
        a valid lower bound (any master optimum under-estimates).
        """
        threshold = self.pool.threshold
        in_pt = self.upper.copy()
        lam_in, _ = self._lam_u(in_pt)
        if lam_in > threshold + self.tol.cut_violation:
            # the upper corner is the most pinned point of the box; by
            # eigenvalue monotonicity nothing in the box can do better
            return INFEASIBLE, None, np.inf
        # pull the feasible anchor near the boundary so in-out midpoints
        # bite immediately (the upper corner may sit at the huge gain cap)
        level = max(1.0, -threshold / max(self.pool.scale, 1e-12))
        while level < float(self.upper.max()):
            cand = np.minimum(np.where(self.upper > self.lower, level, 0.0)
                              + self.lower, self.upper)
            lam_c, _ = self._lam_u(cand)
            if lam_c <= threshold:
                in_pt = cand
                break
            level *= 4.0

        budget = self.max_iters if self.max_iters is not None else self.tol.cut_limit
        bounds = tuple((float(lo), float(hi)) for lo, hi in zip(self.lower, self.upper))
        coeffs, rhs = self.pool.snapshot()
        new_coeffs: list[np.ndarray] = []
        new_rhs: list[float] = []

        def finish(status, beta):
            self.pool.publish(new_coeffs, new_rhs)
            if beta is None:
                return status, None, np.inf
            return status, beta, float(self.v @ beta)

        def add_cut(u: np.ndarray) -> None:
            c, r = self.pool.cut_from(u)
            coeffs.append(c)
            rhs.append(r)
            new_coeffs.append(c)
            new_rhs.append(r)

        while True:
            rows = tuple((c, ">=", r) for c, r in zip(coeffs, rhs))
            lp = LinearProgram(self.v, rows, bounds)
            sol = solve_lp(lp, self.tol)
            if sol.status == INFEASIBLE:
                return finish(INFEASIBLE, None)
            if sol.status != OPTIMAL:
                raise NumericalError(f"cutting-plane master LP returned {sol.status}")
            beta = np.clip(sol.x, self.lower, self.upper)
            lam, violated = _eigen_cuts(self.pool.a, self.pool.scale, beta,
                                        threshold, self.tol)
            if lam <= threshold + self.tol.cut_violation:
                return finish(OPTIMAL, beta)
            if self.cuts_added >= budget:
                return finish(TOLERANCE_REACHED, beta)
            for u in violated:
                add_cut(u)
            # in-out step: a cut at the midpoint toward a feasible point is
            # much deeper than the cut at the master optimum and avoids the
            # sublinear tail of plain cutting planes
            q = 0.5 * (beta + in_pt)
            lam_q, u_q = self._lam_u(q)
            if lam_q <= threshold:
                in_pt = q
            else:
                add_cut(u_q)
            self.cuts_added += 1


def _box_for(mask_free: np.ndarray, fixed: np.ndarray, lo: float, hi: float,
             n: int) -> tuple[np.ndarray, np.ndarray]:
    lower = fixed.copy()
    upper = fixed.copy()
    lower[mask_free] = lo
    upper[mask_free] = hi
    return lower, upper


def _mu_of(a: CouplingMatrix, scale: float, beta: np.ndarray,
           tol: Tolerances) -> float:
    lam, _ = lambda_max(SymMatrix(a.entries - scale * np.diag(beta)), tol)
    return lam


def _precheck(a: CouplingMatrix, scale: float, mask: np.ndarray,
              threshold: float, level: float, tol: Tolerances) -> float:
    """lambda_max at the strongest allowed scheme; used to fail fast."""
    best = np.zeros(a.n)
    best[mask] = level
    return _mu_of(a, scale, best, tol)


def _finish(a: CouplingMatrix, dyn: NodeDynamics, v: np.ndarray, beta: np.ndarray,
            scale: float, gain_scale: float, threshold: float, status: str,
            cuts: int, nodes: int, tol: Tolerances, message: str = "") -> DesignSolution:
    beta = beta.copy()
    beta[np.abs(beta) < 1e-12] = 0.0
    selected = (beta > 0).astype(int)
    mu = _mu_of(a, scale, beta, tol)
    if status == OPTIMAL and mu > threshold + tol.design_feasibility:
        raise NumericalError(
            f"returned design violates the threshold: mu={mu}, threshold={threshold}"
        )
    return DesignSolution(
        status=status, threshold=threshold, beta=beta, selected=selected,
        gains=gain_scale * beta * dyn.c, total_cost=float(v @ beta),
        mu_max=mu, cuts=cuts, nodes=nodes, message=message,
    )


def solve_free(p: DesignProblem, tol: Tolerances = DEFAULT) -> DesignSolution:
    """Minimum-cost free gain design (continuous beta >= 0 on the selectable set)."""
    _require_connected(p.a)
    threshold = sync_threshold(p.dyn, tol)
    mask = p.selectable_mask()

    cap_mu = _precheck(p.a, 1.0, mask, threshold, tol.gain_cap, tol)
    if cap_mu > threshold + tol.cut_violation:
        return DesignSolution(
            status=INFEASIBLE, threshold=threshold,
            message=(
                f"even gains of {tol.gain_cap:g} on all selectable nodes leave "
                f"lambda_max at {cap_mu:.6g} > threshold {threshold:.6g}"
            ),
        )

    pool = _CutPool(p.a.entries, 1.0, threshold)
    lower, upper = _box_for(mask, np.zeros(p.a.n), 0.0, tol.gain_cap, p.a.n)
    master = _Master(pool, p.v, lower, upper, tol)
    status, beta, _ = master.solve()
    if status == INFEASIBLE:
        return DesignSolution(status=INFEASIBLE, threshold=threshold,
                              message="cutting-plane master LP is infeasible")
    if status == TOLERANCE_REACHED:
        mu = _mu_of(p.a, 1.0, beta, tol)
        if mu > threshold + tol.design_feasibility:
            raise NumericalError(
                f"cut limit {tol.cut_limit} reached without a feasible iterate "
                f"(lambda_max {mu:.6g} > threshold {threshold:.6g})"
            )
        return _finish(p.a, p.dyn, p.v, beta, 1.0, 1.0, threshold, status,
                       master.cuts_added, 0, tol,
                       "cut limit reached; last (feasible) iterate returned")
    return _finish(p.a, p.dyn, p.v, beta, 1.0, 1.0, threshold, status,
                   master.cuts_added, 0, tol)


@dataclass
class _Incumbent:
    cost: float = np.inf
    beta: np.ndarray | None = None

    def offer(self, cost: float, beta: np.ndarray) -> None:
        # lexicographically smallest selection among equal-cost optima
        if cost < self.cost - 1e-9:
            self.cost, self.beta = cost, beta.copy()
        elif abs(cost - self.cost) <= 1e-9 and self.beta is not None:
            if tuple(beta > 0) < tuple(self.beta > 0):
                self.cost, self.beta = cost, beta.copy()


def solve_identical_bip(p: DesignProblem, tol: Tolerances = DEFAULT) -> DesignSolution:
    """Exact binary selection at identical gain ratio, by branch and bound.

    The relaxation at each node is the cutting-plane solve with free
    variables boxed to [0,1]; its objective is a valid lower bound, so
    pruning against the incumbent is exact. Branching picks the most
    fractional variable (ties to the smallest node id) and explores the
    fix-to-1 child first.
    """
    _require_connected(p.a)
    threshold = sync_threshold(p.dyn, tol)
    scale = p.gain_ratio
    mask = p.selectable_mask()
    n = p.a.n

    cap_mu = _precheck(p.a, scale, mask, threshold, 1.0, tol)
    if cap_mu > threshold + tol.cut_violation:
        return DesignSolution(
            status=INFEASIBLE, threshold=threshold,
            message=(
                f"pinning every selectable node leaves lambda_max at "
                f"{cap_mu:.6g} > threshold {threshold:.6g}"
            ),
        )

    pool = _CutPool(p.a.entries, scale, threshold)
    incumbent = _Incumbent()
    nodes_seen = 0
    node_limit_hit = False

    def exact_feasible(beta_bin: np.ndarray) -> bool:
        return _mu_of(p.a, scale, beta_bin, tol) <= threshold + 1e-9

    def recurse(fixed: dict[int, float]) -> None:
        nonlocal nodes_seen, node_limit_hit
        if node_limit_hit:
            return
        nodes_seen += 1
        if nodes_seen > tol.bnb_node_limit:
            node_limit_hit = True
            return

        fixed_vec = np.zeros(n)
        free = mask.copy()
        for idx, val in fixed.items():
            fixed_vec[idx] = val
            free[idx] = False
        lower, upper = _box_for(free, fixed_vec, 0.0, 1.0, n)
        # a modest per-node separation budget: unconverged masters still
        # give valid lower bounds, and binary candidates are re-checked
        # against the exact eigenvalue test, so exactness is unaffected
        master = _Master(pool, p.v, lower, upper, tol, max_iters=10)
        status, beta, bound = master.solve()
        if status == INFEASIBLE:
            return
        if bound > incumbent.cost + 1e-9:
            return

        frac = np.where(free & (np.abs(beta - np.round(beta)) > tol.binary_form))[0]
        if frac.size == 0:
            beta_bin = np.round(beta)
            beta_bin[~mask] = 0.0
            if status == OPTIMAL and exact_feasible(beta_bin):
                incumbent.offer(float(p.v @ beta_bin), beta_bin)
                return
            if not np.any(free):
                return
            # rounding broke feasibility (or the relaxation hit its cut
            # limit): branch on any free variable to decide it exactly
            k = int(np.where(free)[0][0])
        else:
            gaps = np.abs(beta[frac] - 0.5)
            near = frac[gaps <= gaps.min() + 1e-12]
            k = int(near.min())
        recurse({**fixed, k: 1.0})
        recurse({**fixed, k: 0.0})

    recurse({})

    if incumbent.beta is None:
        if node_limit_hit:
            return DesignSolution(status=TOLERANCE_REACHED, threshold=threshold,
                                  nodes=nodes_seen,
                                  message="node limit reached with no incumbent")
        return DesignSolution(status=INFEASIBLE, threshold=threshold, nodes=nodes_seen,
                              message="no binary selection satisfies the threshold")

    status = TOLERANCE_REACHED if node_limit_hit else OPTIMAL
    msg = "node limit reached; best incumbent returned" if node_limit_hit else ""
    return _finish(p.a, p.dyn, p.v, incumbent.beta, scale, scale, threshold,
                   status, len(pool), nodes_seen, tol, msg)


def solve_cardinality(p: DesignProblem, tol: Tolerances = DEFAULT) -> DesignSolution:
    """Exact minimum-cost design with at most ``n_total`` pinned nodes.

    Branch and bound over sparsity patterns: each node of the tree either
    commits a variable to the allowed support or forces it to zero. The
    bound is the support-unrestricted cutting-plane relaxation; when its
    solution already satisfies the cardinality cap it is the exact optimum
    of the subtree and closes it.
    """
    if p.n_total is None:
        raise InputError("solve_cardinality requires n_total")
    _require_connected(p.a)
    threshold = sync_threshold(p.dyn, tol)
    mask = p.selectable_mask()
    n = p.a.n
    n_total = int(p.n_total)
    support_eps = 1e-9

    cap_mu = _precheck(p.a, 1.0, mask, threshold, tol.gain_cap, tol)
    if cap_mu > threshold + tol.cut_violation:
        return DesignSolution(
            status=INFEASIBLE, threshold=threshold,
            message=(
                f"even gains of {tol.gain_cap:g} on all selectable nodes leave "
                f"lambda_max at {cap_mu:.6g} > threshold {threshold:.6g}"
            ),
        )

    pool = _CutPool(p.a.entries, 1.0, threshold)
    incumbent = _Incumbent()
    nodes_seen = 0
    node_limit_hit = False

    def relax(allowed: np.ndarray,
              budget: int | None = None) -> tuple[str, np.ndarray | None, float]:
        lower, upper = _box_for(allowed, np.zeros(n), 0.0, tol.gain_cap, n)
        return _Master(pool, p.v, lower, upper, tol, max_iters=budget).solve()

    def recurse(committed: frozenset[int], zeroed: frozenset[int]) -> None:
        nonlocal nodes_seen, node_limit_hit
        if node_limit_hit:
            return
        nodes_seen += 1
        if nodes_seen > tol.bnb_node_limit:
            node_limit_hit = True
            return

        allowed = mask.copy()
        for idx in zeroed:
            allowed[idx] = False
        status, beta, bound = relax(allowed, budget=30)
        if status == INFEASIBLE or bound > incumbent.cost + 1e-9:
            return
        support = np.where(beta > support_eps)[0]
        if status == OPTIMAL and support.size <= n_total:
            # the cardinality-free subtree optimum already satisfies the
            # cap, so it is the subtree optimum and closes the node
            incumbent.offer(float(p.v @ beta), beta)
            return
        if len(committed) >= n_total:
            # every pattern below here has support exactly = committed
            allowed_c = np.zeros(n, dtype=bool)
            for idx in committed:
                allowed_c[idx] = True
            status_c, beta_c, cost_c = relax(allowed_c)
            if status_c == OPTIMAL:
                incumbent.offer(cost_c, beta_c)
            return
        remaining = [int(i) for i in np.where(allowed)[0] if i not in committed]
        if not remaining:
            # the whole allowed set is committed and within the cap
            status_c, beta_c, cost_c = relax(allowed)
            if status_c == OPTIMAL:
                incumbent.offer(cost_c, beta_c)
            return
        # branch on the heaviest undecided node of the relaxed solution,
        # ties to the smallest id; fall back to the smallest remaining id
        weighted = [i for i in remaining if beta[i] > support_eps]
        if weighted:
            vals = beta[weighted]
            k = weighted[int(np.lexsort((weighted, -vals))[0])]
        else:
            k = min(remaining)
        recurse(committed | {k}, zeroed)
        recurse(committed, zeroed | {k})

    recurse(frozenset(), frozenset())

    if incumbent.beta is None:
        if node_limit_hit:
            return DesignSolution(status=TOLERANCE_REACHED, threshold=threshold,
                                  nodes=nodes_seen,
                                  message="node limit reached with no incumbent")
        return DesignSolution(
            status=INFEASIBLE, threshold=threshold, nodes=nodes_seen,
            message=f"no scheme with at most {n_total} pinned nodes meets the threshold",
        )

    status = TOLERANCE_REACHED if node_limit_hit else OPTIMAL
    msg = "node limit reached; best incumbent returned" if node_limit_hit else ""
    return _finish(p.a, p.dyn, p.v, incumbent.beta, 1.0, 1.0, threshold,
                   status, len(pool), nodes_seen, tol, msg)
