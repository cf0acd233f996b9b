"""Stackelberg pinning-attack security game.

Given a binary pinning scheme that synchronizes the network, the attacker
disables the controllers on a subset of the pinned nodes; an attack
succeeds when the residual pinning fails the spectral threshold. All
2^|V_pin| candidate attacks are enumerated, a payoff matrix M is built
(row per successful attack: kappa o beta_attack - eta * 1), and the
defender's allocation comes from the maximin LP

    max eps  s.t.  M pi >= eps * 1,  pi >= 0 (supported on V_pin).

With a per-node cap the LP is always bounded. Without one it may be
unbounded (the defender's payoff grows along some allocation direction);
that case is surfaced as status "unbounded" together with the normalized
ray: the minimum-budget direction with unit payoff slack,
``min 1.pi s.t. M pi >= 1``, which certifies the unboundedness and is the
natural finite summary of the defender's strategy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, InputError, NumericalError
from .network import CouplingMatrix
from .numerics import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    SymMatrix,
    lambda_max,
    solve_lp,
)
from .sync import NodeDynamics, PinningScheme, check_sync_linear, sync_threshold
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "GameSpec", "AttackVector", "DefenseAllocation", "GameOutcome",
    "enumerate_successful_attacks", "build_M", "solve_stackelberg",
    "solve_fixed_defender_budget", "solve_fixed_attacker_budget",
    "MAX_PIN_NODES",
]

MAX_PIN_NODES = 25


@dataclass(frozen=True)
class AttackVector:
    """Binary choice of pinned nodes whose controllers get compromised."""

    beta_attack: np.ndarray

    def __post_init__(self) -> None:
        b = np.array(self.beta_attack, dtype=float)
        if b.ndim != 1 or not np.all(np.isin(b, (0.0, 1.0))):
            raise InputError("beta_attack must be a binary vector")
        b.setflags(write=False)
        object.__setattr__(self, "beta_attack", b)

    def nodes(self) -> tuple[int, ...]:
        return tuple(int(i) + 1 for i in np.where(self.beta_attack == 1.0)[0])


@dataclass(frozen=True)
class DefenseAllocation:
    """Nonnegative protection budget per node, supported on V_pin."""

    pi_d: np.ndarray

    def __post_init__(self) -> None:
        p = np.array(self.pi_d, dtype=float)
        if p.ndim != 1 or not np.all(np.isfinite(p)) or np.any(p < -1e-12):
            raise InputError("pi_d must be a finite nonnegative vector")
        p[p < 0] = 0.0
        p.setflags(write=False)
        object.__setattr__(self, "pi_d", p)

    @property
    def total(self) -> float:
        return float(self.pi_d.sum())


@dataclass(frozen=True)
class GameSpec:
    a: CouplingMatrix
    beta_pin: np.ndarray       # binary; must synchronize the unattacked network
    kappa: np.ndarray          # per-node compromise-difficulty coefficients, > 0
    dyn: NodeDynamics
    eta: float = 0.0           # defender's budget-penalty weight, >= 0
    gain_ratio: float = 1.0
    pi_cap: np.ndarray | None = None   # optional per-node cap on the allocation

    def __post_init__(self) -> None:
        n = self.a.n
        pin = np.array(self.beta_pin, dtype=float)
        if pin.shape != (n,) or not np.all(np.isin(pin, (0.0, 1.0))):
            raise InputError(f"beta_pin must be a binary vector of length {n}")
        if pin.sum() == 0:
            raise InputError("beta_pin must pin at least one node")
        pin.setflags(write=False)
        object.__setattr__(self, "beta_pin", pin)
        kap = np.array(self.kappa, dtype=float)
        if kap.shape != (n,) or np.any(kap <= 0) or not np.all(np.isfinite(kap)):
            raise InputError("kappa must be positive for every node")
        kap.setflags(write=False)
        object.__setattr__(self, "kappa", kap)
        if self.eta < 0:
            raise InputError("eta must be nonnegative")
        if not self.gain_ratio > 0:
            raise InputError("gain_ratio must be positive")
        if self.pi_cap is not None:
            cap = np.broadcast_to(np.asarray(self.pi_cap, dtype=float), (n,)).copy()
            if np.any(cap < 0) or not np.all(np.isfinite(cap)):
                raise InputError("pi_cap must be finite and nonnegative")
            cap.setflags(write=False)
            object.__setattr__(self, "pi_cap", cap)
        report = check_sync_linear(
            self.a, PinningScheme(self.gain_ratio * pin), self.dyn
        )
        if not report.synced:
            raise InputError(
                "beta_pin does not synchronize the unattacked network "
                f"(lambda_max {report.mu_max:.6g} vs threshold {report.threshold:.6g})"
            )

    @property
    def v_pin(self) -> tuple[int, ...]:
        return tuple(int(i) + 1 for i in np.where(self.beta_pin == 1.0)[0])


@dataclass(frozen=True)
class GameOutcome:
    status: str
    pi_d_star: DefenseAllocation | None = None
    beta_attack_star: AttackVector | None = None
    attack_cost: float | None = None       # U_a = (kappa o pi) . beta_attack
    defender_payoff: float | None = None   # R_d = U_a - eta * 1.pi
    game_value: float | None = None        # the LP's eps* when bounded
    ray_normalized: bool = False           # pi is the unit-slack unbounded direction
    attacks: tuple[AttackVector, ...] = ()
    # unused-kappa report: nodes outside V_pin whose kappa can never matter
    unused_kappa_nodes: tuple[int, ...] = ()

    @property
    def t0(self) -> int:
        return len(self.attacks)


def enumerate_successful_attacks(spec: GameSpec,
                                 tol: Tolerances = DEFAULT) -> list[AttackVector]:
    """All attacks on V_pin that break the threshold, in increasing binary
    order of the subset mask over the sorted pinned nodes."""
    pin_idx = [int(i) for i in np.where(spec.beta_pin == 1.0)[0]]
    k = len(pin_idx)
    if k > MAX_PIN_NODES:
        raise CapacityError(
            f"{k} pinned nodes means 2^{k} candidate attacks; enumeration is "
            f"guarded at {MAX_PIN_NODES} (minimal-attack pruning is out of scope)"
        )
    threshold = sync_threshold(spec.dyn, tol)
    a = spec.a.entries
    out: list[AttackVector] = []
    for mask in range(2 ** k):
        attack = np.zeros(spec.a.n)
        for b in range(k):
            if mask >> b & 1:
                attack[pin_idx[b]] = 1.0
        eff = spec.beta_pin * (1.0 - attack)
        lam, _ = lambda_max(SymMatrix(a - spec.gain_ratio * np.diag(eff)), tol)
        if lam >= threshold:
            out.append(AttackVector(attack))
    return out


def build_M(attacks: list[AttackVector], kappa: np.ndarray,
            eta: float) -> np.ndarray:
    """Payoff matrix: row i is kappa o beta_attack_i - eta * 1."""
    if not attacks:
        raise InputError("at least one attack row is required")
    kappa = np.asarray(kappa, dtype=float)
    return np.stack([kappa * atk.beta_attack - eta for atk in attacks])


def _best_response(attacks: list[AttackVector], kappa: np.ndarray,
                   pi: np.ndarray) -> tuple[AttackVector, float]:
    """Cheapest successful attack against pi; ties go to enumeration order."""
    sigma = kappa * pi
    costs = [float(sigma @ atk.beta_attack) for atk in attacks]
    best_cost = min(costs)
    for atk, cost in zip(attacks, costs):
        if cost <= best_cost + 1e-9:
            return atk, cost
    raise AssertionError("unreachable")


def _pi_lp_columns(spec: GameSpec) -> list[int]:
    return [int(i) for i in np.where(spec.beta_pin == 1.0)[0]]


def _expand(cols: list[int], values: np.ndarray, n: int) -> np.ndarray:
    pi = np.zeros(n)
    for c, v in zip(cols, values):
        pi[c] = max(0.0, float(v))
    return pi


def _unused_kappa(spec: GameSpec) -> tuple[int, ...]:
    # kappa off the pinned set can never enter any payoff row
    return tuple(int(i) + 1 for i in np.where(spec.beta_pin == 0.0)[0])


def _require_attacks(attacks: list[AttackVector]) -> None:
    if not attacks:
        raise InputError("no successful attack exists; game degenerate")


def solve_stackelberg(spec: GameSpec, tol: Tolerances = DEFAULT) -> GameOutcome:
    """Defender's maximin allocation and the attacker's best response.

    Returns status "unbounded" (with the normalized ray as the allocation)
    when the defender's payoff is unbounded and no cap is set.
    """
    attacks = enumerate_successful_attacks(spec, tol)
    _require_attacks(attacks)
    m = build_M(attacks, spec.kappa, spec.eta)
    cols = _pi_lp_columns(spec)
    t0, n = m.shape
    nv = len(cols)

    # variables: pi over V_pin, then eps (free); maximise eps
    obj = np.zeros(nv + 1)
    obj[-1] = -1.0
    rows = []
    for i in range(t0):
        row = np.zeros(nv + 1)
        row[:nv] = m[i, cols]
        row[-1] = -1.0
        rows.append((row, ">=", 0.0))
    bounds: list[tuple[float | None, float | None]] = []
    for c in cols:
        hi = float(spec.pi_cap[c]) if spec.pi_cap is not None else None
        bounds.append((0.0, hi))
    bounds.append((None, None))
    sol = solve_lp(LinearProgram(obj, tuple(rows), tuple(bounds)), tol)

    if sol.status == OPTIMAL:
        pi = _expand(cols, sol.x[:nv], n)
        eps = float(sol.x[-1])
        atk, cost = _best_response(attacks, spec.kappa, pi)
        return GameOutcome(
            status=OPTIMAL,
            pi_d_star=DefenseAllocation(pi),
            beta_attack_star=atk,
            attack_cost=cost,
            defender_payoff=cost - spec.eta * float(pi.sum()),
            game_value=eps,
            attacks=tuple(attacks),
            unused_kappa_nodes=_unused_kappa(spec),
        )
    if sol.status != UNBOUNDED:
        raise NumericalError(f"stackelberg LP unexpectedly {sol.status}")

    # unbounded: normalize the ray as min-budget direction at unit slack
    ray_rows = tuple((m[i, cols], ">=", 1.0) for i in range(t0))
    ray = solve_lp(
        LinearProgram(np.ones(nv), ray_rows, tuple((0.0, None) for _ in cols)), tol
    )
    if ray.status != OPTIMAL:
        raise NumericalError(
            f"ray-normalization LP returned {ray.status} for an unbounded game"
        )
    pi = _expand(cols, ray.x, n)
    atk, cost = _best_response(attacks, spec.kappa, pi)
    return GameOutcome(
        status=UNBOUNDED,
        pi_d_star=DefenseAllocation(pi),
        beta_attack_star=atk,
        attack_cost=cost,
        defender_payoff=None,
        game_value=None,
        ray_normalized=True,
        attacks=tuple(attacks),
        unused_kappa_nodes=_unused_kappa(spec),
    )


def solve_fixed_defender_budget(spec: GameSpec, omega_d: float,
                                tol: Tolerances = DEFAULT) -> GameOutcome:
    """Max-min attack cost under a fixed defender budget (eta forced to 0)."""
    if not omega_d > 0:
        raise InputError("omega_d must be positive")
    attacks = enumerate_successful_attacks(spec, tol)
    _require_attacks(attacks)
    m = build_M(attacks, spec.kappa, 0.0)
    cols = _pi_lp_columns(spec)
    t0, n = m.shape
    nv = len(cols)

    obj = np.zeros(nv + 1)
    obj[-1] = -1.0
    rows = []
    for i in range(t0):
        row = np.zeros(nv + 1)
        row[:nv] = m[i, cols]
        row[-1] = -1.0
        rows.append((row, ">=", 0.0))
    budget = np.zeros(nv + 1)
    budget[:nv] = 1.0
    rows.append((budget, "<=", float(omega_d)))
    bounds = [(0.0, None)] * nv + [(None, None)]
    sol = solve_lp(LinearProgram(obj, tuple(rows), tuple(bounds)), tol)
    if sol.status != OPTIMAL:
        raise NumericalError(f"fixed-budget LP unexpectedly {sol.status}")
    pi = _expand(cols, sol.x[:nv], n)
    eps = float(sol.x[-1])
    atk, cost = _best_response(attacks, spec.kappa, pi)
    return GameOutcome(
        status=OPTIMAL,
        pi_d_star=DefenseAllocation(pi),
        beta_attack_star=atk,
        attack_cost=cost,
        defender_payoff=cost,
        game_value=eps,
        attacks=tuple(attacks),
        unused_kappa_nodes=_unused_kappa(spec),
    )


def solve_fixed_attacker_budget(spec: GameSpec, omega_a: float,
                                tol: Tolerances = DEFAULT) -> DefenseAllocation:
    """Cheapest allocation pricing every successful attack above omega_a
    (eta forced to 0)."""
    if not omega_a > 0:
        raise InputError("omega_a must be positive")
    attacks = enumerate_successful_attacks(spec, tol)
    _require_attacks(attacks)
    m = build_M(attacks, spec.kappa, 0.0)
    cols = _pi_lp_columns(spec)
    nv = len(cols)
    rows = tuple((m[i, cols], ">=", float(omega_a)) for i in range(m.shape[0]))
    sol = solve_lp(
        LinearProgram(np.ones(nv), rows, tuple((0.0, None) for _ in cols)), tol
    )
    if sol.status == INFEASIBLE:
        raise NumericalError(
            "cannot price out the attacker: the pricing LP is infeasible"
        )
    if sol.status != OPTIMAL:
        raise NumericalError(f"pricing LP unexpectedly {sol.status}")
    return DefenseAllocation(_expand(cols, sol.x, spec.a.n))
