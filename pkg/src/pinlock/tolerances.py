"""Central numeric tolerance record.

Every solver in the package takes a ``Tolerances`` instance and falls back
to ``DEFAULT``. The CLI additionally honours the ``PINLOCK_TOL`` environment
variable, a JSON object whose keys override individual fields, e.g.
``PINLOCK_TOL='{"cut_violation": 1e-9}'``.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    # eigensolvers
    jacobi_offdiag: float = 1e-12     # off-diagonal Frobenius target, relative to ||M||_F
    jacobi_max_sweeps: int = 64
    eigen_reconstruction: float = 1e-8
    orthonormality: float = 1e-9
    qr_iters_per_dim: int = 100       # shifted-QR cap is qr_iters_per_dim * n

    # linear programming
    lp_feasibility: float = 1e-8
    lp_pivot: float = 1e-10

    # design solvers
    cut_violation: float = 1e-7       # eigenvalue-constraint slack at cutting-plane exit
    cut_limit: int = 500
    design_feasibility: float = 1e-6  # slack allowed in returned designs
    binary_form: float = 1e-6         # distance to {0,1} that counts as binary
    bnb_node_limit: int = 100_000
    gain_cap: float = 1e6             # box bound on gains; also the feasibility pre-check level

    # synchronization verdicts
    boundary_margin: float = 1e-9     # |margin| below this reports "boundary", not synced


DEFAULT = Tolerances()

ENV_VAR = "PINLOCK_TOL"


def from_env(base: Tolerances | None = None, var: str = ENV_VAR) -> Tolerances:
    """Return ``base`` with fields overridden by the JSON object in ``var``."""
    base = base if base is not None else DEFAULT
    raw = os.environ.get(var)
    if not raw:
        return base
    data = json.loads(raw)
    if not isinstance(data, dict):
        raise ValueError(f"{var} must hold a JSON object")
    known = {f.name for f in fields(Tolerances)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ValueError(f"{var}: unknown tolerance keys {unknown}")
    return replace(base, **data)
