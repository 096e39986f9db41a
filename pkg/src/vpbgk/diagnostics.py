"""Measured quantities: invariants, entropy, weighted norms, stability ledger."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from . import _kernels
from .grid import PhaseGrid
from .transport import DistributionField

if TYPE_CHECKING:  # pragma: no cover - typing only
    from .solver import SimulationState, SolverConfig


@dataclass
class DiagnosticsRecord:
    """Scalar diagnostics of one simulation state.

    mass            Σ f ΔxΔv
    momentum        Σ v f ΔxΔv
    kinetic_energy  Σ |v|² f ΔxΔv
    field_energy    Σ |E|² Δx
    entropy         Σ f log f ΔxΔv with 0·log 0 := 0
    min_f           minimum over non-ghost nodes (recorded before any flagging)
    weighted_norms  q → sup |f|·(1+|v|)^q
    e_inf           max_i |E_i|
    """

    step: int
    t: float
    mass: float
    momentum: float
    kinetic_energy: float
    field_energy: float
    entropy: float
    min_f: float
    weighted_norms: dict[float, float]
    e_inf: float


def weighted_linf_norm(f: DistributionField, grid: PhaseGrid, q: float) -> float:
    """Exact max over non-ghost nodes of |f_{i,j}|·(1+|v_j|)^q."""
    if not (q > 0):
        raise ValueError(f"q must be > 0, got {q}")
    f.check_shape(grid)
    w = (1.0 + np.abs(grid.v)) ** q
    return float(np.max(np.abs(f.data) * w))


def entropy_sum(f: DistributionField, grid: PhaseGrid) -> float:
    """Σ f log f ΔxΔv over non-ghost nodes; entries <= 0 contribute zero."""
    data = f.data
    h = np.where(data > 0.0, data * np.log(np.where(data > 0.0, data, 1.0)), 0.0)
    return float(h.sum() * grid.dv * grid.dx)


def collect_record(state: "SimulationState", grid: PhaseGrid,
                   q_list=(4.0, 5.0)) -> DiagnosticsRecord:
    """Evaluate every DiagnosticsRecord quantity for the given state."""
    f = state.f
    m0, m1, m2 = _kernels.moments(f.data, grid.v, grid.dv)
    dx = grid.dx
    e = np.asarray(state.e, dtype=np.float64)
    return DiagnosticsRecord(
        step=state.step,
        t=state.t,
        mass=_kernels.seq_sum(m0) * dx,
        momentum=_kernels.seq_sum(m1) * dx,
        kinetic_energy=_kernels.seq_sum(m2) * dx,
        field_energy=_kernels.seq_sum(e * e) * dx,
        entropy=entropy_sum(f, grid),
        min_f=float(f.data.min()),
        weighted_norms={float(q): weighted_linf_norm(f, grid, q) for q in q_list},
        e_inf=float(np.max(np.abs(e))),
    )


@dataclass
class StabilityCheck:
    name: str
    passed: bool
    measured: float
    bound: float


@dataclass
class StabilityFlags:
    """Pass/fail ledger for the directly measurable stability bounds.

    a1_mass       total mass <= (2 + t_final)·exp(t_final/eps)
    a2_field      max|E| <= (2 + t_final)·exp(t_final/eps) + 1
    positivity    min f > 0 strictly
    maxwellian_floor
                  min over nodes of f·exp(+|v|^alpha) — the empirical
                  lower-bound profile, recorded without a threshold.
    """

    a1_mass: StabilityCheck
    a2_field: StabilityCheck
    positivity: StabilityCheck
    maxwellian_floor: float

    @property
    def all_passed(self) -> bool:
        return self.a1_mass.passed and self.a2_field.passed and self.positivity.passed


def exp_bound(t_final: float, eps: float) -> float:
    """(2 + t_final)·exp(t_final/eps), saturating to +inf instead of overflowing."""
    try:
        return (2.0 + t_final) * math.exp(t_final / eps)
    except OverflowError:
        return math.inf


def stability_report(state: "SimulationState", config: "SolverConfig",
                     grid: PhaseGrid, *, alpha: float = 1.0) -> StabilityFlags:
    """Evaluate the mass bound, field bound, and strict positivity for a state.

    ``alpha`` sets the exponent of the recorded lower-bound profile
    min f·exp(|v|^alpha); it is reported, never asserted.
    """
    mass, min_f = _kernels.step_stats(state.f.data, grid.dv, grid.dx)
    e_inf = float(np.max(np.abs(state.e)))
    mass_bound = exp_bound(config.t_final, config.eps)
    field_bound = mass_bound + 1.0
    profile = float(np.min(state.f.data * np.exp(np.abs(grid.v) ** alpha)))
    return StabilityFlags(
        a1_mass=StabilityCheck("a1_mass_bound", mass <= mass_bound, mass, mass_bound),
        a2_field=StabilityCheck("a2_field_bound", e_inf <= field_bound, e_inf, field_bound),
        positivity=StabilityCheck("positivity", min_f > 0.0, min_f, 0.0),
        maxwellian_floor=profile,
    )
