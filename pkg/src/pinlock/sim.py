"""Fixed-step RK4 simulation of the pinning-controlled network.

The integrated system is

    dx_i/dt = f(x_i) + c * sum_j a_ij g(x_j) + d_i u_i,
    u_i = -c_i [g(x_i) - g(x_bar)],       c_i = beta_i * c,

with linear inner coupling g(x) = a_g x + b_g. When an attack vector is
present the effective pinning factor is beta_i * (1 - attack_i) for the
whole run (a before/after comparison is two runs).

No adaptive stepping: reproducibility is preferred over efficiency, and
identical configs (including the seed of any generated initial cloud)
yield bit-identical trajectories.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import InputError
from .network import Topology, coupling_matrix
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "CHEN_ALPHA", "CHEN_BETA", "CHEN_GAMMA", "DEFAULT_X0_SEED", "DIVERGENCE_LIMIT",
    "SimConfig", "Trajectory", "RateEstimate",
    "chen_vector_field", "default_initial_states", "simulate", "convergence_rate",
]

CHEN_ALPHA = 35.0
CHEN_BETA = 3.0
CHEN_GAMMA = 28.0

# documented seed for the default pseudo-random initial cloud in [-1, 1]^dim
DEFAULT_X0_SEED = 1729

DIVERGENCE_LIMIT = 1e9

VectorField = Union[str, np.ndarray, Callable[[np.ndarray], np.ndarray]]


def chen_vector_field(x) -> np.ndarray:
    """Chen oscillator right-hand side at a single 3-dimensional state."""
    x = np.asarray(x, dtype=float)
    if x.shape != (3,):
        raise InputError("chen_vector_field expects a 3-vector")
    x1, x2, x3 = x
    return np.array([
        CHEN_ALPHA * (x2 - x1),
        (CHEN_GAMMA - CHEN_ALPHA) * x1 - x1 * x3 + CHEN_GAMMA * x2,
        x1 * x2 - CHEN_BETA * x3,
    ])


def _chen_batch(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    x1, x2, x3 = x[:, 0], x[:, 1], x[:, 2]
    out[:, 0] = CHEN_ALPHA * (x2 - x1)
    out[:, 1] = (CHEN_GAMMA - CHEN_ALPHA) * x1 - x1 * x3 + CHEN_GAMMA * x2
    out[:, 2] = x1 * x2 - CHEN_BETA * x3
    return out


def default_initial_states(n_nodes: int, node_dim: int = 3,
                           seed: int = DEFAULT_X0_SEED, scale: float = 1.0,
                           x_bar=None) -> np.ndarray:
    """Deterministic pseudo-random cloud x_bar + U(-1, 1)^dim * scale."""
    rng = np.random.default_rng(seed)
    cloud = scale * rng.uniform(-1.0, 1.0, size=(n_nodes, node_dim))
    if x_bar is not None:
        cloud += np.asarray(x_bar, dtype=float)
    return cloud


@dataclass(frozen=True)
class SimConfig:
    topology: Topology
    node_dim: int
    vector_field: VectorField      # "chen", a square matrix (linear f), or a callable
    c: float
    beta: np.ndarray               # beta_i = c_i / c
    x_bar: np.ndarray
    x0: np.ndarray                 # (n_nodes, node_dim)
    dt: float
    t_end: float
    a_g: float = 1.0
    b_g: float = 0.0
    attack: np.ndarray | None = None

    def __post_init__(self) -> None:
        n = self.topology.n
        if not self.dt > 0:
            raise InputError("dt must be positive")
        if self.t_end < self.dt:
            raise InputError("t_end must be at least one step")
        if not self.c > 0 or not self.a_g > 0:
            raise InputError("c and a_g must be positive")
        beta = np.array(self.beta, dtype=float)
        if beta.shape != (n,) or np.any(beta < 0) or not np.all(np.isfinite(beta)):
            raise InputError(f"beta must be a nonnegative vector of length {n}")
        beta.setflags(write=False)
        object.__setattr__(self, "beta", beta)
        xb = np.array(self.x_bar, dtype=float)
        if xb.shape != (self.node_dim,):
            raise InputError(f"x_bar must have dimension {self.node_dim}")
        xb.setflags(write=False)
        object.__setattr__(self, "x_bar", xb)
        x0 = np.array(self.x0, dtype=float)
        if x0.shape != (n, self.node_dim) or not np.all(np.isfinite(x0)):
            raise InputError(f"x0 must be a finite ({n}, {self.node_dim}) array")
        x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)
        if self.attack is not None:
            atk = np.array(self.attack, dtype=float)
            if atk.shape != (n,) or not np.all(np.isin(atk, (0.0, 1.0))):
                raise InputError("attack must be a binary vector over the nodes")
            atk.setflags(write=False)
            object.__setattr__(self, "attack", atk)
        f = self._field_function()
        fx = f(self.x_bar[None, :])[0]
        if float(np.sqrt((fx * fx).sum())) > 1e-9:
            raise InputError("x_bar must be an equilibrium of the node dynamics, f(x_bar)=0")

    def _field_function(self) -> Callable[[np.ndarray], np.ndarray]:
        vf = self.vector_field
        if isinstance(vf, str):
            if vf != "chen":
                raise InputError(f"unknown builtin vector field {vf!r}")
            if self.node_dim != 3:
                raise InputError("the chen field is 3-dimensional")
            return _chen_batch
        if isinstance(vf, np.ndarray) or (
            not callable(vf) and np.asarray(vf).ndim == 2
        ):
            m = np.asarray(vf, dtype=float)
            if m.shape != (self.node_dim, self.node_dim):
                raise InputError("linear vector-field matrix has the wrong shape")
            return lambda x: x @ m.T
        if callable(vf):
            def rowwise(x: np.ndarray) -> np.ndarray:
                return np.stack([np.asarray(vf(row), dtype=float) for row in x])
            return rowwise
        raise InputError("vector_field must be 'chen', a matrix, or a callable")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray       # (n_steps+1, n_nodes, node_dim)
    sync_error: np.ndarray   # max_i ||x_i - x_bar||_2 per instant
    diverged: bool


@dataclass(frozen=True)
class RateEstimate:
    rate: float        # per-second exponential rate; negative = converging
    exact_sync: bool   # errors hit zero inside the fitted window


def simulate(cfg: SimConfig, tol: Tolerances = DEFAULT) -> Trajectory:
    """Integrate with classical RK4 at fixed step; record every step.

    Any state magnitude above ``DIVERGENCE_LIMIT`` truncates the run and
    sets the diverged flag.
    """
    a = coupling_matrix(cfg.topology).entries
    f = cfg._field_function()
    eff = cfg.beta if cfg.attack is None else cfg.beta * (1.0 - cfg.attack)
    gains = (eff * cfg.c * cfg.a_g)[:, None]
    ca = cfg.c * cfg.a_g
    x_bar = cfg.x_bar

    def rhs(x: np.ndarray) -> np.ndarray:
        # row sums of A are exactly zero, so the b_g part of g cancels
        return f(x) + ca * (a @ x) + gains * (x_bar - x)

    n_steps = int(round(cfg.t_end / cfg.dt))
    times = np.arange(n_steps + 1) * cfg.dt
    states = np.empty((n_steps + 1, cfg.topology.n, cfg.node_dim))
    states[0] = cfg.x0
    x = cfg.x0.copy()
    dt = cfg.dt
    diverged = False
    recorded = n_steps
    for k in range(n_steps):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * dt * k1)
        k3 = rhs(x + 0.5 * dt * k2)
        k4 = rhs(x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)) or np.abs(x).max() > DIVERGENCE_LIMIT:
            diverged = True
            recorded = k
            break
        states[k + 1] = x
    times = times[:recorded + 1]
    states = states[:recorded + 1]
    err = np.sqrt(((states - x_bar) ** 2).sum(axis=2)).max(axis=1)
    return Trajectory(times=times, states=states, sync_error=err, diverged=diverged)


def convergence_rate(traj: Trajectory) -> RateEstimate:
    """Least-squares slope of log(sync_error) over the final half of the run."""
    n = traj.times.shape[0]
    start = n // 2
    t = traj.times[start:]
    e = traj.sync_error[start:]
    if np.any(e <= 0):
        return RateEstimate(rate=-np.inf, exact_sync=True)
    log_e = np.log(e)
    t_c = t - t.mean()
    denom = float(t_c @ t_c)
    if denom == 0.0:
        return RateEstimate(rate=0.0, exact_sync=False)
    slope = float(t_c @ (log_e - log_e.mean())) / denom
    return RateEstimate(rate=slope, exact_sync=False)
