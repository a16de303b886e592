"""Accelerated linearized ADMM/ALM solvers with non-ergodic O(1/k^2) rate certificates.

Two families of momentum block updates (implicit-subgradient and extrapolated
prox forms), their hybrids, one-block ALM reductions, unconstrained momentum
reductions, and an inexact variant with certified subproblem stationarity,
plus runtime-verifiable energy and feasibility bounds computed from initial
data and a saddle reference.
"""

from .engine import (
    SolverConfig,
    RunReport,
    VARIANTS,
    certified_config,
    init_state,
    nesterov_reference,
    reduce_alm,
    run,
)
from .metrics import (
    CertificateBounds,
    EnergyBreakdown,
    certificates,
    check_rate_bounds,
    energy,
    energy_trajectory,
    fit_rate,
    lambda_recovery,
    lyapunov_monotone,
)
from .model import (
    CompositeBlock,
    ProblemInstance,
    ProxTerm,
    SaddleReference,
    SmoothTerm,
    check_saddle,
    feasibility,
    lagrangian,
)
from .problems import GeneratorSpec, gen, kkt_solve, reference_solve, scalar_p0
from .schedule import ScheduleRule, corollary_params

__version__ = "0.1.0"
