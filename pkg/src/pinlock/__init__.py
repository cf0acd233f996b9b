"""pinlock: pinning-control design and security analysis for coupled networks.

Layers, bottom up: ``numerics`` (eigensolvers, simplex), ``network``
(topologies and coupling matrices), ``sync`` (spectral synchronization
criteria), ``design`` (minimum-cost pinning solvers), ``game``
(Stackelberg pinning-attack game), ``sim`` (RK4 network simulator),
``cli`` (the ``pinlock`` command).
"""
from .errors import CapacityError, InputError, NumericalError, PinlockError
from .tolerances import DEFAULT, Tolerances
from .numerics import (
    SymMatrix, Spectrum, symmetric_eigen, lambda_max, general_eigenvalues,
    LinearProgram, LpSolution, solve_lp, OPTIMAL, INFEASIBLE, UNBOUNDED,
)
from .network import (
    Topology, CouplingMatrix, coupling_matrix, degrees, is_connected,
)
from .sync import (
    NodeDynamics, PinningScheme, SyncReport, GeneralSyncReport,
    control_matrix_B, local_rate, sync_threshold,
    check_sync_linear, check_sync_general, LAMBDA_CONVENTIONS,
)
from .design import (
    DesignProblem, DesignSolution, TOLERANCE_REACHED,
    solve_free, solve_identical_bip, solve_cardinality,
)
from .game import (
    GameSpec, AttackVector, DefenseAllocation, GameOutcome,
    enumerate_successful_attacks, build_M, solve_stackelberg,
    solve_fixed_defender_budget, solve_fixed_attacker_budget,
)
from .sim import (
    SimConfig, Trajectory, RateEstimate,
    chen_vector_field, default_initial_states, simulate, convergence_rate,
)
from . import fixtures

__version__ = "0.1.0"
