"""Deterministic kinetic relaxation solver on a periodic 1D phase-space grid.

First-order finite-difference scheme: explicit upwind transport with a
self-consistent electrostatic field, implicit single-relaxation collisions
(closed form, no nonlinear solve), and a nested-grid self-convergence
harness.  All grid reductions are fixed-order, so results are bit-identical
across runs and thread counts.
"""

__version__ = "0.1.0"

from .diagnostics import (
    DiagnosticsRecord,
    StabilityCheck,
    StabilityFlags,
    collect_record,
    stability_report,
    weighted_linf_norm,
)
from .field import electric_field, green_kernel
from .grid import PhaseGrid, TimeStepPlan, build_grid, cfl_dt
from .harness import (
    ConvergenceReport,
    LevelSummary,
    ReportRow,
    convergence_study,
    observed_order,
    pairwise_error,
    restrict_fine_to_coarse,
)
from .relaxation import (
    DegenerateDensity,
    MacroFields,
    NegativeTemperature,
    discrete_maxwellian,
    discrete_moments,
    imex_step,
)
from .solver import (
    DiagnosticsLog,
    PerturbedMaxwellianIC,
    SimulationState,
    SolverConfig,
    TabulatedIC,
    UniformMaxwellianIC,
    advance_step,
    initialize,
    run,
)
from .transport import (
    CflViolation,
    DistributionField,
    transport_step,
    upwind_flux_v,
    upwind_flux_x,
)

__all__ = [
    "CflViolation",
    "ConvergenceReport",
    "DegenerateDensity",
    "DiagnosticsLog",
    "DiagnosticsRecord",
    "DistributionField",
    "LevelSummary",
    "MacroFields",
    "NegativeTemperature",
    "PerturbedMaxwellianIC",
    "PhaseGrid",
    "ReportRow",
    "SimulationState",
    "SolverConfig",
    "StabilityCheck",
    "StabilityFlags",
    "TabulatedIC",
    "TimeStepPlan",
    "UniformMaxwellianIC",
    "advance_step",
    "build_grid",
    "cfl_dt",
    "collect_record",
    "convergence_study",
    "discrete_maxwellian",
    "discrete_moments",
    "electric_field",
    "green_kernel",
    "imex_step",
    "initialize",
    "observed_order",
    "pairwise_error",
    "restrict_fine_to_coarse",
    "run",
    "stability_report",
    "transport_step",
    "upwind_flux_v",
    "upwind_flux_x",
    "weighted_linf_norm",
]
