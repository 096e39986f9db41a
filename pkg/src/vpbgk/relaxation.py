"""Velocity moments, local Maxwellian, and the implicit relaxation step.

The relaxation update is implicit in the collision term but has a closed
form because the Maxwellian of the post-transport distribution already has
the right moments: f_new = (eps*f_tilde + dt*M(f_tilde)) / (eps + dt).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import PhaseGrid
from .transport import DistributionField

#: Density at or below this is treated as degenerate (division unsafe).
RHO_FLOOR = 1e-300

#: Temperature at or below this is treated as collapsed.
TEMP_FLOOR = 1e-14


class DegenerateDensity(RuntimeError):
    """Raised when a nodal density falls at or below RHO_FLOOR."""

    def __init__(self, i: int, value: float):
        self.i = int(i)
        self.value = float(value)
        super().__init__(f"density {self.value:.6g} <= {RHO_FLOOR:g} at node i={self.i}")


class NegativeTemperature(RuntimeError):
    """Raised when a nodal temperature falls at or below TEMP_FLOOR."""

    def __init__(self, i: int, value: float):
        self.i = int(i)
        self.value = float(value)
        super().__init__(
            f"temperature {self.value:.6g} <= {TEMP_FLOOR:g} at node i={self.i}"
        )


@dataclass
class MacroFields:
    """Macroscopic fields per spatial node: density, bulk velocity, temperature."""

    rho: np.ndarray
    u: np.ndarray
    temp: np.ndarray


def discrete_moments(f: DistributionField, grid: PhaseGrid, *,
                     compensated: bool = False) -> MacroFields:
    """Macroscopic moments of f by midpoint quadrature over the velocity nodes.

    Computes the raw sums m0 = Σ_j f Δv, m1 = Σ_j v_j f Δv, m2 = Σ_j v_j² f Δv
    sequentially over ascending j (ghost rows excluded), then
    ρ = m0, U = m1/m0, T = (m2 − m0·U²)/m0.  Moments are *not* renormalized;
    quadrature defects stay visible to the diagnostics.

    Parameters
    ----------
    compensated : bool
        Use Kahan-compensated accumulation (same ordering).  Off by default.

    Raises
    ------
    DegenerateDensity
        If any m0 <= RHO_FLOOR.
    NegativeTemperature
        If any resulting T <= TEMP_FLOOR.
    """
    f.check_shape(grid)
    reducer = _kernels.moments_compensated if compensated else _kernels.moments
    m0, m1, m2 = reducer(f.data, grid.v, grid.dv)
    if not (np.isfinite(m0).all() and np.isfinite(m1).all() and np.isfinite(m2).all()):
        raise ValueError("non-finite moments; distribution contains inf or NaN")
    bad = np.flatnonzero(m0 <= RHO_FLOOR)
    if bad.size:
        i = int(bad[0])
        raise DegenerateDensity(i, m0[i])
    u = m1 / m0
    temp = (m2 - m0 * u * u) / m0
    bad = np.flatnonzero(temp <= TEMP_FLOOR)
    if bad.size:
        i = int(bad[0])
        raise NegativeTemperature(i, temp[i])
    return MacroFields(rho=m0, u=u, temp=temp)


def _validated_macro(macro: MacroFields, n_x: int) -> MacroFields:
    rho = np.asarray(macro.rho, dtype=np.float64)
    u = np.asarray(macro.u, dtype=np.float64)
    temp = np.asarray(macro.temp, dtype=np.float64)
    if rho.shape != (n_x,) or u.shape != (n_x,) or temp.shape != (n_x,):
        raise ValueError(f"macro field shapes must all be ({n_x},)")
    bad = np.flatnonzero(~(rho > RHO_FLOOR))
    if bad.size:
        i = int(bad[0])
        raise DegenerateDensity(i, rho[i])
    bad = np.flatnonzero(~(temp > TEMP_FLOOR))
    if bad.size:
        i = int(bad[0])
        raise NegativeTemperature(i, temp[i])
    return MacroFields(rho=rho, u=u, temp=temp)


def discrete_maxwellian(macro: MacroFields, grid: PhaseGrid) -> DistributionField:
    """Tabulate the local Maxwellian ρ/√(2πT)·exp(−(v−U)²/(2T)) on the grid.

    Ghost rows are filled by the same formula evaluated at v = ±(v_max + dv).
    """
    macro = _validated_macro(macro, grid.n_x)
    data, glo, ghi = _kernels.maxwellian_table(
        macro.rho, macro.u, macro.temp, grid.v, grid.v_ghost_lo, grid.v_ghost_hi
    )
    return DistributionField(data=data, ghost_lo=glo, ghost_hi=ghi)


def _imex_from_macro(f_tilde: DistributionField, macro: MacroFields,
                     grid: PhaseGrid, eps: float, dt: float) -> DistributionField:
    """Relaxation combine against an already-computed set of moments."""
    out, oglo, oghi = _kernels.imex_combine(
        f_tilde.data, macro.rho, macro.u, macro.temp, grid.v, eps, dt
    )
    return DistributionField(data=out, ghost_lo=oglo, ghost_hi=oghi)


def imex_step(f_tilde: DistributionField, grid: PhaseGrid, eps: float,
              dt: float, *, compensated: bool = False) -> DistributionField:
    """Implicit relaxation step with the closed-form solution.

    Returns (eps*f_tilde + dt*M(f_tilde)) / (eps + dt) pointwise, where
    M(f_tilde) is the discrete Maxwellian built from the moments of f_tilde.
    Output ghost rows are refreshed per the Neumann closure (copies of the
    output boundary rows).

    Raises whatever :func:`discrete_moments` raises on invalid moments.
    """
    if not (eps > 0 and np.isfinite(eps)):
        raise ValueError(f"eps must be a positive finite real, got {eps}")
    if not (dt > 0 and np.isfinite(dt)):
        raise ValueError(f"dt must be a positive finite real, got {dt}")
    macro = discrete_moments(f_tilde, grid, compensated=compensated)
    return _imex_from_macro(f_tilde, macro, grid, eps, dt)
