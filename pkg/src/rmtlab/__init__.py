"""Equilibrium measures, orthogonal polynomial kernels and their scaling limits.

Submodules
----------
potential      polynomial external fields
equilibrium    one-cut (signed) equilibrium measures and critical constants
orthopoly      recurrence coefficients and Christoffel-Darboux kernels
painleve2      Hastings-McLeod solution and psi-functions
limit_kernels  sine, Airy and critical kernels
harness        bulk, edge and double-scaling experiments
"""

__version__ = "0.1.0"

from .airy import AiryValue, airy
from .equilibrium import (
    CriticalData,
    EquilibriumMeasure,
    Support,
    critical_constants,
    density_psi_t,
    solve_one_cut,
)
from .errors import RmtlabError
from .harness import (
    ConvergenceReport,
    ExperimentConfig,
    bulk_experiment,
    double_scaling_experiment,
    edge_experiment,
    emit_report,
)
from .limit_kernels import CritKernelContext, k_bulk, k_crit, k_crit_integral, k_edge
from .orthopoly import RecurrenceTable, build_recurrence, cd_kernel, eval_weighted_poly
from .painleve2 import HastingsMcLeodSolution, psi_eval, solve_hastings_mcleod
from .potential import Potential, critical_quartic, gaussian, quartic_family

__all__ = [
    "AiryValue",
    "airy",
    "CriticalData",
    "EquilibriumMeasure",
    "Support",
    "critical_constants",
    "density_psi_t",
    "solve_one_cut",
    "RmtlabError",
    "ConvergenceReport",
    "ExperimentConfig",
    "bulk_experiment",
    "double_scaling_experiment",
    "edge_experiment",
    "emit_report",
    "CritKernelContext",
    "k_bulk",
    "k_crit",
    "k_crit_integral",
    "k_edge",
    "RecurrenceTable",
    "build_recurrence",
    "cd_kernel",
    "eval_weighted_poly",
    "HastingsMcLeodSolution",
    "psi_eval",
    "solve_hastings_mcleod",
    "Potential",
    "critical_quartic",
    "gaussian",
    "quartic_family",
]
