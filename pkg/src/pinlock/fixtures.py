"""Builtin named fixtures.

Three names are recognised anywhere a config accepts a topology, a
dynamics block, or a whole job:

* ``paper-fig2``  — the bundled nine-node example topology;
* ``chen``        — Chen-oscillator node dynamics (alpha=35, beta=3,
                    gamma=28) linearised at the origin, with a_g=1,
                    b_g=0, c=10;
* ``paper-game``  — the bundled security-game job on ``paper-fig2`` with
                    pinned nodes {4, 6, 7}. Its dynamics block selects the
                    ``max-real-over-c`` threshold convention, the only one
                    under which this pinning scheme synchronizes the
                    unattacked network (see the sync module notes).
"""
from __future__ import annotations

import numpy as np

from .errors import InputError
from .network import Topology
from .sync import NodeDynamics

__all__ = [
    "FIG2_EDGES", "CHEN_JACOBIAN",
    "builtin_topology", "builtin_dynamics", "builtin_job",
    "TOPOLOGY_NAMES", "DYNAMICS_NAMES", "JOB_NAMES",
]

FIG2_EDGES = (
    (1, 4), (2, 4), (3, 4), (4, 5), (4, 6), (4, 7),
    (5, 6), (6, 7), (5, 8), (7, 9),
)

# Jacobian of the Chen oscillator at the origin
CHEN_JACOBIAN = (
    (-35.0, 35.0, 0.0),
    (-7.0, 28.0, 0.0),
    (0.0, 0.0, -3.0),
)

TOPOLOGY_NAMES = ("paper-fig2",)
DYNAMICS_NAMES = ("chen",)
JOB_NAMES = ("paper-game",)


def builtin_topology(name: str) -> Topology:
    if name == "paper-fig2":
        return Topology(9, FIG2_EDGES)
    raise InputError(f"unknown builtin topology {name!r}; known: {TOPOLOGY_NAMES}")


def builtin_dynamics(name: str, lambda_convention: str | None = None) -> NodeDynamics:
    if name == "chen":
        return NodeDynamics(
            jf=np.array(CHEN_JACOBIAN),
            a_g=1.0, b_g=0.0, c=10.0,
            lambda_convention=lambda_convention or "max-real",
        )
    raise InputError(f"unknown builtin dynamics {name!r}; known: {DYNAMICS_NAMES}")


def builtin_job(name: str) -> dict:
    """A complete job config, in the same JSON shape the CLI reads from files."""
    if name == "paper-game":
        return {
            "schema": "pinlock/v1",
            "kind": "game",
            "topology": "paper-fig2",
            "dynamics": {
                "jf": [list(r) for r in CHEN_JACOBIAN],
                "a_g": 1.0, "b_g": 0.0, "c": 10.0,
                "lambda_convention": "max-real-over-c",
            },
            "beta_pin": [0, 0, 0, 1, 0, 1, 1, 0, 0],
            "kappa": [1, 1, 1, 10, 5, 6, 5, 1, 1],
            "eta": 2.0,
            "gain_ratio": 1.0,
            "mode": "stackelberg",
        }
    raise InputError(f"unknown builtin job {name!r}; known: {JOB_NAMES}")
