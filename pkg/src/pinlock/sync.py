"""Synchronization criteria for pinning-controlled networks.

Two tests are provided:

* ``check_sync_general`` — the exact linearized criterion: every matrix
  ``jf + c * mu_i * jg`` over the spectrum ``mu_i`` of ``B = A - diag(beta)``
  must have all eigenvalue real parts negative.
* ``check_sync_linear`` — the scalar threshold form for linear inner
  coupling ``g(x) = a_g x + b_g``: synchronized iff
  ``lambda_max(A - diag(beta)) < -rate / (c * a_g)`` where ``rate`` is the
  local-dynamics eigenvalue scalar under the configured convention.

Conventions for the local rate (``lambda_convention``):

* ``max-real``      — largest real part of the eigenvalues of ``jf``
                      (exact for linear coupling; the default);
* ``symmetric-part``— largest eigenvalue of ``(jf + jf') / 2`` (a
                      conservative bound when ``jf`` is not symmetric);
* ``max-real-over-c``— ``max-real`` additionally divided by the coupling
                      strength. The bundled nine-node example schemes
                      (fixtures ``paper-fig2`` / ``paper-game``) sit on the
                      synchronization boundary only under this convention;
                      it is kept for reproducing those published gains and
                      is NOT implied by the linearized mode analysis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .network import CouplingMatrix, Topology, is_connected
from .numerics import SymMatrix, general_eigenvalues, lambda_max, symmetric_eigen
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "LAMBDA_CONVENTIONS", "NodeDynamics", "PinningScheme",
    "SyncReport", "GeneralSyncReport",
    "control_matrix_B", "local_rate", "sync_threshold",
    "check_sync_linear", "check_sync_general",
]

LAMBDA_CONVENTIONS = ("max-real", "symmetric-part", "max-real-over-c")


@dataclass(frozen=True)
class NodeDynamics:
    """Local Jacobian and inner-coupling parameters of the identical nodes."""

    jf: np.ndarray
    a_g: float = 1.0
    b_g: float = 0.0
    c: float = 1.0
    jg: np.ndarray | None = None  # defaults to a_g * I (linear coupling)
    lambda_convention: str = "max-real"

    def __post_init__(self) -> None:
        jf = np.array(self.jf, dtype=float)
        if jf.ndim != 2 or jf.shape[0] != jf.shape[1]:
            raise InputError("jf must be a square matrix")
        if not np.all(np.isfinite(jf)):
            raise InputError("jf must be finite")
        if not self.c > 0:
            raise InputError("coupling strength c must be positive")
        if not self.a_g > 0:
            raise InputError("inner-coupling slope a_g must be positive")
        if self.lambda_convention not in LAMBDA_CONVENTIONS:
            raise InputError(
                f"unknown lambda_convention {self.lambda_convention!r}; "
                f"choose one of {LAMBDA_CONVENTIONS}"
            )
        jf.setflags(write=False)
        object.__setattr__(self, "jf", jf)
        if self.jg is not None:
            jg = np.array(self.jg, dtype=float)
            if jg.shape != jf.shape or not np.all(np.isfinite(jg)):
                raise InputError("jg must be a finite matrix of the same shape as jf")
            jg.setflags(write=False)
            object.__setattr__(self, "jg", jg)

    @property
    def node_dim(self) -> int:
        return self.jf.shape[0]

    def jg_matrix(self) -> np.ndarray:
        if self.jg is not None:
            return self.jg
        return self.a_g * np.eye(self.node_dim)


@dataclass(frozen=True)
class PinningScheme:
    """Per-node pinning variable beta_i = c_i d_i / c; zero means unpinned."""

    beta: np.ndarray

    def __post_init__(self) -> None:
        b = np.array(self.beta, dtype=float)
        if b.ndim != 1:
            raise InputError("beta must be a vector")
        if not np.all(np.isfinite(b)):
            raise InputError("beta must be finite")
        if np.any(b < 0):
            raise InputError("beta must be nonnegative")
        b.setflags(write=False)
        object.__setattr__(self, "beta", b)

    @property
    def n(self) -> int:
        return self.beta.shape[0]

    def pinned_nodes(self) -> list[int]:
        return [i + 1 for i in range(self.n) if self.beta[i] > 0]


@dataclass(frozen=True)
class SyncReport:
    synced: bool
    mu_max: float
    threshold: float
    margin: float       # threshold - mu_max; positive means synchronized
    boundary: bool      # |margin| within the boundary tolerance


@dataclass(frozen=True)
class GeneralSyncReport:
    synced: bool
    worst_real_part: float
    boundary: bool


def control_matrix_B(a: CouplingMatrix, scheme: PinningScheme) -> SymMatrix:
    """B = A - diag(beta)."""
    if scheme.n != a.n:
        raise InputError(f"scheme has {scheme.n} entries for a {a.n}-node network")
    return SymMatrix(a.entries - np.diag(scheme.beta))


def local_rate(dyn: NodeDynamics, tol: Tolerances = DEFAULT) -> float:
    """The scalar standing in for the largest local-dynamics eigenvalue."""
    if dyn.lambda_convention == "symmetric-part":
        val, _ = lambda_max(SymMatrix(0.5 * (dyn.jf + dyn.jf.T)), tol)
        return val
    rate = float(max(e.real for e in general_eigenvalues(dyn.jf, tol)))
    if dyn.lambda_convention == "max-real-over-c":
        rate /= dyn.c
    return rate


def sync_threshold(dyn: NodeDynamics, tol: Tolerances = DEFAULT) -> float:
    """Synchronization holds iff lambda_max(A - diag(beta)) is below this value."""
    return -local_rate(dyn, tol) / (dyn.c * dyn.a_g)


def _require_connected(a: CouplingMatrix) -> None:
    off = a.entries - np.diag(np.diag(a.entries))
    edges = [
        (i + 1, j + 1)
        for i in range(a.n) for j in range(i + 1, a.n)
        if off[i, j] != 0.0
    ]
    if not is_connected(Topology(a.n, edges)):
        raise InputError("network must be connected; isolated clusters break the criterion")


def check_sync_linear(a: CouplingMatrix, scheme: PinningScheme,
                      dyn: NodeDynamics, tol: Tolerances = DEFAULT) -> SyncReport:
    """Threshold test under linear inner coupling. Strict inequality; a
    margin within ``tol.boundary_margin`` of zero reports boundary=True and
    synced=False."""
    _require_connected(a)
    mu, _ = lambda_max(control_matrix_B(a, scheme), tol)
    threshold = sync_threshold(dyn, tol)
    margin = threshold - mu
    boundary = abs(margin) <= tol.boundary_margin
    return SyncReport(
        synced=bool(margin > 0 and not boundary),
        mu_max=mu, threshold=threshold, margin=margin, boundary=boundary,
    )


def check_sync_general(a: CouplingMatrix, scheme: PinningScheme,
                       dyn: NodeDynamics, tol: Tolerances = DEFAULT) -> GeneralSyncReport:
    """Mode-by-mode stability test: all eigenvalues of jf + c*mu_i*jg must
    have negative real parts, over the whole spectrum mu_i of B."""
    _require_connected(a)
    spec = symmetric_eigen(control_matrix_B(a, scheme), tol)
    jg = dyn.jg_matrix()
    worst = -np.inf
    for mu in spec.eigenvalues:
        eigs = general_eigenvalues(dyn.jf + dyn.c * mu * jg, tol)
        worst = max(worst, float(max(e.real for e in eigs)))
    boundary = abs(worst) <= tol.boundary_margin
    return GeneralSyncReport(
        synced=bool(worst < 0 and not boundary),
        worst_real_part=worst, boundary=boundary,
    )
