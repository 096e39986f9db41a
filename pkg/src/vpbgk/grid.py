"""Phase-space grid on the unit torus times a truncated velocity interval."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform node-centered grid for (x, v) phase space.

    Space is the periodic unit interval sampled at ``x_i = i*dx`` for
    ``i = 0..n_x-1`` (node n_x would alias node 0).  Velocity is the symmetric
    interval ``[-v_max, v_max]`` sampled at ``v_j = j*dv`` for
    ``j = -n_v..n_v``, i.e. ``2*n_v + 1`` nodes with ``v_0 = 0`` exactly.
    One ghost row beyond each velocity end (at ``±(v_max + dv)``) carries the
    homogeneous Neumann closure used by the transport stencil.

    Parameters
    ----------
    n_x : int
        Number of spatial cells (and nodes), >= 2.
    n_v : int
        Velocity half-count, >= 1; the grid has ``2*n_v + 1`` velocity nodes.
    v_max : float
        Velocity truncation bound, > 0.
    """

    n_x: int
    n_v: int
    v_max: float

    def __post_init__(self):
        if self.n_x < 2:
            raise ValueError(f"n_x must be >= 2, got {self.n_x}")
        if self.n_v < 1:
            raise ValueError(f"n_v must be >= 1, got {self.n_v}")
        if not (self.v_max > 0):
            raise ValueError(f"v_max must be > 0, got {self.v_max}")

    @property
    def dx(self) -> float:
        return 1.0 / self.n_x

    @property
    def dv(self) -> float:
        return self.v_max / self.n_v

    @property
    def n_v_nodes(self) -> int:
        """Number of non-ghost velocity nodes, ``2*n_v + 1``."""
        return 2 * self.n_v + 1

    @property
    def x(self) -> np.ndarray:
        """Spatial nodes ``x_i = i*dx``, shape (n_x,)."""
        return np.arange(self.n_x) * self.dx

    @property
    def v(self) -> np.ndarray:
        """Velocity nodes ``v_j = j*dv`` for j in [-n_v, n_v], ascending."""
        return np.arange(-self.n_v, self.n_v + 1) * self.dv

    @property
    def v_ghost_lo(self) -> float:
        """Velocity of the lower ghost row, ``-(v_max + dv)``."""
        return -(self.n_v + 1) * self.dv

    @property
    def v_ghost_hi(self) -> float:
        return (self.n_v + 1) * self.dv

    def column(self, j: int) -> int:
        """Array column index for signed velocity index ``j``."""
        if not -self.n_v <= j <= self.n_v:
            raise IndexError(f"velocity index {j} outside [-{self.n_v}, {self.n_v}]")
        return j + self.n_v


def build_grid(n_x: int, n_v: int, v_max: float) -> PhaseGrid:
    """Construct a :class:`PhaseGrid`; see the class docstring for conventions."""
    return PhaseGrid(n_x=int(n_x), n_v=int(n_v), v_max=float(v_max))


def cfl_dt(grid: PhaseGrid, e_max: float, sigma: float) -> float:
    """Largest admissible time step for the explicit transport sweep.

    Solves ``dt * (v_max/dx + e_max/dv) = sigma`` for dt, so the Courant sum
    ``dt/dx*|v_j| + dt/dv*|E_i|`` is at most ``sigma`` at every node when
    ``|E_i| <= e_max``.

    Parameters
    ----------
    grid : PhaseGrid
    e_max : float
        Bound on the field magnitude over the spatial nodes, >= 0.
    sigma : float
        Safety factor, strictly inside (0, 1).
    """
    if not (0.0 < sigma < 1.0):
        raise ValueError(f"sigma must lie strictly in (0, 1), got {sigma}")
    if e_max < 0:
        raise ValueError(f"e_max must be >= 0, got {e_max}")
    return sigma / (grid.v_max / grid.dx + e_max / grid.dv)


@dataclass(frozen=True)
class TimeStepPlan:
    """A concrete step size together with the inputs that justified it."""

    dt: float
    sigma: float
    t_final: float

    def __post_init__(self):
        if not (self.dt > 0):
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not (0.0 < self.sigma < 1.0):
            raise ValueError(f"sigma must lie strictly in (0, 1), got {self.sigma}")

    def admissible(self, grid: PhaseGrid, e_max: float) -> bool:
        """True when dt satisfies the Courant condition for field bound e_max."""
        return self.dt * (grid.v_max / grid.dx + e_max / grid.dv) <= self.sigma


def truncation_velocity(c: float, dv: float, gamma: float = 0.5) -> float:
    """Velocity bound ``c / dv**gamma`` coupling truncation to resolution.

    Provided for experiments only; the convergence harness keeps v_max fixed.
    gamma must lie in [0.5, 1).
    """
    if not (0.5 <= gamma < 1.0):
        raise ValueError(f"gamma must lie in [0.5, 1), got {gamma}")
    if not (c > 0 and dv > 0):
        raise ValueError("c and dv must be positive")
    return c / dv**gamma
