"""Time-loop orchestration: density → field → transport → relaxation."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .diagnostics import DiagnosticsRecord, collect_record
from .field import electric_field
from .grid import PhaseGrid, build_grid, cfl_dt
from .relaxation import (
    RHO_FLOOR,
    DegenerateDensity,
    MacroFields,
    NegativeTemperature,
    _imex_from_macro,
    discrete_moments,
)
from .transport import CflViolation, DistributionField, transport_step

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class PerturbedMaxwellianIC:
    """Unit Maxwellian with a 1% cosine density ripple (config tag ``paper_test``).

    f0(x, v) = (1/sqrt(2*pi)) * (1 + 0.01*cos(2*pi*x)) * exp(-v^2/2)
    """

    tag = "paper_test"


@dataclass(frozen=True)
class UniformMaxwellianIC:
    """Spatially uniform Maxwellian (config tag ``uniform_maxwellian``)."""

    rho: float = 1.0
    u: float = 0.0
    temp: float = 1.0

    tag = "uniform_maxwellian"

    def __post_init__(self):
        if not (self.rho > 0):
            raise ValueError(f"rho must be > 0, got {self.rho}")
        if not (self.temp > 0):
            raise ValueError(f"temp must be > 0, got {self.temp}")


@dataclass(eq=False)
class TabulatedIC:
    """Caller-supplied nodal values, shape (n_x, 2*n_v+1) (config tag ``tabulated``)."""

    values: np.ndarray

    tag = "tabulated"


InitialCondition = PerturbedMaxwellianIC | UniformMaxwellianIC | TabulatedIC


@dataclass(frozen=True)
class SolverConfig:
    """Everything a run needs.

    n_x, n_v, v_max   grid resolution (see PhaseGrid)
    eps               relaxation strength parameter, > 0
    t_final           end time, >= 0
    sigma             Courant safety factor in (0, 1)
    initial_condition one of the InitialCondition variants
    diagnostics_every cadence in steps for full diagnostics records
                      (0 = start and end only; cheap per-step stats are
                      always traced)
    q_list            weighted-norm exponents, each > 3
    fixed_dt          pin dt to the value computed from the initial field
                      instead of adapting each step
    force_zero_field  replace the field solve by zeros (diagnostic mode)
    transport_only    skip the relaxation half-step (diagnostic mode)
    compensated_moments
                      Kahan-compensated moment sums (same ordering)
    """

    n_x: int
    n_v: int
    v_max: float
    eps: float
    t_final: float
    sigma: float
    initial_condition: InitialCondition = field(default_factory=PerturbedMaxwellianIC)
    diagnostics_every: int = 0
    q_list: tuple[float, ...] = (4.0, 5.0)
    fixed_dt: bool = False
    force_zero_field: bool = False
    transport_only: bool = False
    compensated_moments: bool = False

    def __post_init__(self):
        if self.n_x < 2:
            raise ValueError(f"n_x must be >= 2, got {self.n_x}")
        if self.n_v < 1:
            raise ValueError(f"n_v must be >= 1, got {self.n_v}")
        if not (self.v_max > 0):
            raise ValueError(f"v_max must be > 0, got {self.v_max}")
        if not (self.eps > 0):
            raise ValueError(f"eps must be > 0, got {self.eps}")
        if self.t_final < 0:
            raise ValueError(f"t_final must be >= 0, got {self.t_final}")
        if not (0.0 < self.sigma < 1.0):
            raise ValueError(f"sigma must lie strictly in (0, 1), got {self.sigma}")
        if self.diagnostics_every < 0:
            raise ValueError(
                f"diagnostics_every must be >= 0, got {self.diagnostics_every}"
            )
        object.__setattr__(self, "q_list", tuple(float(q) for q in self.q_list))
        for q in self.q_list:
            if not (q > 3):
                raise ValueError(f"every q must be > 3, got {q}")

    def grid(self) -> PhaseGrid:
        return build_grid(self.n_x, self.n_v, self.v_max)


@dataclass
class SimulationState:
    """One time level: t, step counter, f, the field that drove the last
    step (or the initial field), and the macro moments.
    """

    t: float
    step: int
    f: DistributionField
    e: np.ndarray
    macro: MacroFields


@dataclass
class DiagnosticsLog:
    """Per-run diagnostics.

    records    full DiagnosticsRecord list at the configured cadence
    t          times t_0..t_N (length steps+1)
    dt         step sizes (length steps)
    mass       total mass of f at each time level
    min_f      min over non-ghost nodes of f at each time level
    e_inf      entry n < steps: magnitude of the field that drove step n+1;
               entry steps: the final refreshed field
    """

    records: list[DiagnosticsRecord]
    t: np.ndarray
    dt: np.ndarray
    mass: np.ndarray
    min_f: np.ndarray
    e_inf: np.ndarray
    steps: int
    dt_policy: str
    wall_time: float


def _density(f: DistributionField, grid: PhaseGrid) -> np.ndarray:
    """Nodal density with the degeneracy floor check (temperature not needed)."""
    m0, _, _ = _kernels.moments(f.data, grid.v, grid.dv)
    bad = np.flatnonzero(m0 <= RHO_FLOOR)
    if bad.size:
        i = int(bad[0])
        raise DegenerateDensity(i, m0[i])
    return m0


def initialize(config: SolverConfig, grid: PhaseGrid) -> SimulationState:
    """State at t = 0 for the configured initial condition.

    Nodal values are f0(x_i, v_j); the ghost rows carry f0(x_i, ±v_max),
    i.e. the boundary value itself, per the Neumann closure.
    """
    if (grid.n_x, grid.n_v, grid.v_max) != (config.n_x, config.n_v, config.v_max):
        raise ValueError(
            f"grid ({grid.n_x}, {grid.n_v}, {grid.v_max}) does not match config "
            f"({config.n_x}, {config.n_v}, {config.v_max})"
        )
    ic = config.initial_condition
    if isinstance(ic, PerturbedMaxwellianIC):
        amp = _INV_SQRT_2PI * (1.0 + 0.01 * np.cos(2.0 * np.pi * grid.x))
        gauss = np.exp(-grid.v**2 / 2.0)
        edge = np.exp(-(grid.v_max**2) / 2.0)
        f0 = DistributionField(
            data=amp[:, None] * gauss[None, :],
            ghost_lo=amp * edge,
            ghost_hi=amp * edge,
        )
    elif isinstance(ic, UniformMaxwellianIC):
        rho = np.full(grid.n_x, float(ic.rho))
        u = np.full(grid.n_x, float(ic.u))
        temp = np.full(grid.n_x, float(ic.temp))
        # Ghosts evaluate the same profile at ±v_max (the boundary value).
        data, glo, ghi = _kernels.maxwellian_table(
            rho, u, temp, grid.v, -grid.v_max, grid.v_max
        )
        f0 = DistributionField(data=data, ghost_lo=glo, ghost_hi=ghi)
    elif isinstance(ic, TabulatedIC):
        f0 = DistributionField.from_values(grid, ic.values)
    else:
        raise TypeError(f"unknown initial condition {ic!r}")

    macro = discrete_moments(f0, grid, compensated=config.compensated_moments)
    if config.force_zero_field:
        e = np.zeros(grid.n_x)
    else:
        e = electric_field(grid, macro.rho)
    return SimulationState(t=0.0, step=0, f=f0, e=e, macro=macro)


def advance_step(state: SimulationState, grid: PhaseGrid, config: SolverConfig,
                 dt: float | None = None) -> SimulationState:
    """One full step: density, field, admissible dt, transport, relaxation.

    ``dt=None`` (the default) adapts: dt = min(cfl_dt(grid, max|E|, sigma),
    t_final - t).  An explicit dt (used by the fixed-dt mode) is still capped
    at the remaining time.  Either way the final step lands on t_final
    exactly.
    """
    if not (state.t < config.t_final):
        raise ValueError(
            f"advance_step called at t={state.t}, not before t_final={config.t_final}"
        )
    rho = _density(state.f, grid)
    if config.force_zero_field:
        e = np.zeros(grid.n_x)
    else:
        e = electric_field(grid, rho)

    remaining = config.t_final - state.t
    if dt is None:
        dt = cfl_dt(grid, float(np.max(np.abs(e))), config.sigma)
    if dt >= remaining:
        dt = remaining
        t_new = config.t_final
    else:
        t_new = state.t + dt

    f_tilde = transport_step(state.f, e, grid, dt)
    macro = discrete_moments(f_tilde, grid, compensated=config.compensated_moments)
    if config.transport_only:
        f_new = f_tilde
    else:
        f_new = _imex_from_macro(f_tilde, macro, grid, config.eps, dt)
    return SimulationState(t=t_new, step=state.step + 1, f=f_new, e=e, macro=macro)


def run(config: SolverConfig) -> tuple[SimulationState, DiagnosticsLog]:
    """Integrate from t = 0 to t = t_final exactly; deterministic per config.

    Returns the final state (field and moments refreshed from the final f)
    and the diagnostics log.  Step errors are re-raised with (t, step)
    context appended to their message.
    """
    grid = config.grid()
    t0 = time.perf_counter()
    state = initialize(config, grid)

    mass0, fmin0 = _kernels.step_stats(state.f.data, grid.dv, grid.dx)
    times = [state.t]
    dts: list[float] = []
    masses = [mass0]
    min_fs = [fmin0]
    e_infs: list[float] = []
    records = [collect_record(state, grid, config.q_list)]

    dt_fixed: float | None = None
    if config.fixed_dt:
        dt_fixed = cfl_dt(grid, float(np.max(np.abs(state.e))), config.sigma)

    cadence = config.diagnostics_every
    while state.t < config.t_final:
        t_prev = state.t
        try:
            state = advance_step(state, grid, config, dt=dt_fixed)
        except (CflViolation, DegenerateDensity, NegativeTemperature) as err:
            err.args = (f"{err} [during step {state.step + 1}, t={t_prev!r}]",)
            raise
        mass, fmin = _kernels.step_stats(state.f.data, grid.dv, grid.dx)
        times.append(state.t)
        dts.append(state.t - t_prev)
        masses.append(mass)
        min_fs.append(fmin)
        e_infs.append(float(np.max(np.abs(state.e))))
        if cadence > 0 and state.step % cadence == 0 and state.t < config.t_final:
            records.append(collect_record(state, grid, config.q_list))

    # Refresh the reported field/moments so they describe the *final* f.
    macro = discrete_moments(state.f, grid, compensated=config.compensated_moments)
    if config.force_zero_field:
        e_final = np.zeros(grid.n_x)
    else:
        e_final = electric_field(grid, macro.rho)
    state = replace(state, e=e_final, macro=macro)
    e_infs.append(float(np.max(np.abs(e_final))))

    final_record = collect_record(state, grid, config.q_list)
    if records and records[-1].step == state.step:
        records[-1] = final_record
    else:
        records.append(final_record)

    log = DiagnosticsLog(
        records=records,
        t=np.asarray(times),
        dt=np.asarray(dts),
        mass=np.asarray(masses),
        min_f=np.asarray(min_fs),
        e_inf=np.asarray(e_infs),
        steps=state.step,
        dt_policy="fixed" if config.fixed_dt else "adaptive",
        wall_time=time.perf_counter() - t0,
    )
    return state, log
