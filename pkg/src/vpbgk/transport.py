"""Explicit upwind transport sweep on the phase-space grid.

The sweep applies one forward-Euler step of the advection part
(x-transport at speed v, v-transport at the local field strength) written as
a convex combination of the 5-point stencil.  Periodic in x, homogeneous
Neumann closure in v via the ghost rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import PhaseGrid


class CflViolation(RuntimeError):
    """A requested step breaks the Courant bound at some node.

    Attributes
    ----------
    i : int
        Spatial index of an offending node.
    j : int
        Signed velocity index of an offending node.
    courant : float
        The attained Courant sum dt/dx*|v_j| + dt/dv*|E_i| there.
    """

    def __init__(self, i: int, j: int, courant: float):
        self.i = int(i)
        self.j = int(j)
        self.courant = float(courant)
        super().__init__(
            f"Courant sum {self.courant:.6g} >= 1 at node (i={self.i}, j={self.j})"
        )


@dataclass
class DistributionField:
    """Distribution values on a :class:`PhaseGrid` plus Neumann ghost rows.

    ``data[i, j + n_v]`` holds f(x_i, v_j) for j in [-n_v, n_v]; ``ghost_lo``
    and ``ghost_hi`` hold the extra rows at v = -(v_max+dv) and +(v_max+dv)
    that close the velocity stencil.  After any scheme step the ghosts equal
    the adjacent boundary rows.
    """

    data: np.ndarray
    ghost_lo: np.ndarray
    ghost_hi: np.ndarray

    @classmethod
    def zeros(cls, grid: PhaseGrid) -> "DistributionField":
        return cls(
            data=np.zeros((grid.n_x, grid.n_v_nodes)),
            ghost_lo=np.zeros(grid.n_x),
            ghost_hi=np.zeros(grid.n_x),
        )

    @classmethod
    def from_values(cls, grid: PhaseGrid, data: np.ndarray,
                    ghost_lo=None, ghost_hi=None) -> "DistributionField":
        """Wrap an (n_x, 2*n_v+1) array; ghosts default to boundary copies."""
        data = np.ascontiguousarray(data, dtype=np.float64)
        if data.shape != (grid.n_x, grid.n_v_nodes):
            raise ValueError(
                f"distribution shape {data.shape} does not match grid "
                f"({grid.n_x}, {grid.n_v_nodes})"
            )
        glo = data[:, 0].copy() if ghost_lo is None else np.asarray(ghost_lo, dtype=np.float64).copy()
        ghi = data[:, -1].copy() if ghost_hi is None else np.asarray(ghost_hi, dtype=np.float64).copy()
        return cls(data=data, ghost_lo=glo, ghost_hi=ghi)

    def copy(self) -> "DistributionField":
        return DistributionField(self.data.copy(), self.ghost_lo.copy(), self.ghost_hi.copy())

    def refresh_ghosts(self) -> None:
        """Reset both ghost rows to copies of the boundary rows (Neumann)."""
        self.ghost_lo = self.data[:, 0].copy()
        self.ghost_hi = self.data[:, -1].copy()

    def check_shape(self, grid: PhaseGrid) -> None:
        if self.data.shape != (grid.n_x, grid.n_v_nodes):
            raise ValueError(
                f"distribution shape {self.data.shape} does not match grid "
                f"({grid.n_x}, {grid.n_v_nodes})"
            )
        if self.ghost_lo.shape != (grid.n_x,) or self.ghost_hi.shape != (grid.n_x,):
            raise ValueError("ghost rows must have shape (n_x,)")


def upwind_flux_x(v: float, f_left: float, f_right: float) -> float:
    """Interface value max(v,0)*f_left + (-min(v,0))*f_right."""
    return max(v, 0.0) * f_left - min(v, 0.0) * f_right


def upwind_flux_v(e: float, f_down: float, f_up: float) -> float:
    """Velocity-direction analogue of :func:`upwind_flux_x`."""
    return max(e, 0.0) * f_down - min(e, 0.0) * f_up


def transport_step(f: DistributionField, e: np.ndarray, grid: PhaseGrid,
                   dt: float) -> DistributionField:
    """Advance f by one explicit upwind sweep of size dt.

    Parameters
    ----------
    f : DistributionField
        Current distribution; ghost rows are read by the velocity stencil and
        are expected to satisfy the Neumann closure.
    e : ndarray, shape (n_x,)
        Field strength per spatial node (explicit, frozen during the step).
    grid : PhaseGrid
    dt : float
        Step size; every node must satisfy dt/dx*|v_j| + dt/dv*|E_i| < 1.

    Returns
    -------
    DistributionField
        The swept distribution, output ghosts refreshed to boundary copies.

    Raises
    ------
    CflViolation
        If any node attains a Courant sum >= 1.
    """
    f.check_shape(grid)
    e = np.asarray(e, dtype=np.float64)
    if e.shape != (grid.n_x,):
        raise ValueError(f"field shape {e.shape} does not match grid ({grid.n_x},)")
    if not (dt > 0 and np.isfinite(dt)):
        raise ValueError(f"dt must be a positive finite real, got {dt}")

    v = grid.v
    dt_dx = dt / grid.dx
    dt_dv = dt / grid.dv
    wxp = dt_dx * np.maximum(v, 0.0)
    wxm = dt_dx * (-np.minimum(v, 0.0))
    abs_e = np.abs(e)

    # The Courant sum separates into a j-part and an i-part, so its sup over
    # nodes is attained at (argmax |E|, argmax |v|).
    j_worst = int(np.argmax(wxp + wxm))
    i_worst = int(np.argmax(abs_e))
    courant = (wxp[j_worst] + wxm[j_worst]) + dt_dv * abs_e[i_worst]
    if courant >= 1.0:
        raise CflViolation(i_worst, j_worst - grid.n_v, courant)

    out, oglo, oghi = _kernels.transport_update(
        f.data, f.ghost_lo, f.ghost_hi, e, wxp, wxm, dt_dv
    )
    return DistributionField(data=out, ghost_lo=oglo, ghost_hi=oghi)
