"""Nested-grid self-convergence studies.

Each level doubles both n_x and n_v with v_max fixed, so coarse nodes are a
subset of fine nodes (coarse x_i = fine x_{2i}, coarse v_j = fine v_{2j}).
Errors are self-convergence errors between consecutive levels: the finer
solution is restricted to the coarser grid by sampling and the difference is
measured in the weighted sup norms (plus max|ΔE| for the field), always at
the shared final time.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .diagnostics import weighted_linf_norm
from .grid import PhaseGrid
from .solver import SimulationState, SolverConfig, run
from .transport import DistributionField

#: Report metric name for the field error column.
FIELD_METRIC = "E_Linf"


def norm_metric_name(q: float) -> str:
    """Report metric name for the weighted sup norm with exponent q."""
    return f"f_Linf_q{q:g}"


@dataclass
class ReportRow:
    """One consecutive-level comparison, labeled by the coarser resolution."""

    n_x: int
    n_v: int
    dt_policy: str
    errors: dict[str, float]
    orders: dict[str, float]


@dataclass
class LevelSummary:
    """Per-level run facts used by the stability ledger and the manifest."""

    n_x: int
    n_v: int
    steps: int
    min_f: float
    max_mass: float
    max_e_inf: float
    wall_time: float


@dataclass
class ConvergenceReport:
    rows: list[ReportRow]
    metrics: list[str]
    dt_policy: str
    eps: float
    t_final: float
    sigma: float
    v_max: float
    levels: list[LevelSummary]
    #: Final state per level; populated only on request (the arrays are big).
    states: list[SimulationState] | None = None


def restrict_fine_to_coarse(f_fine: DistributionField, grid_fine: PhaseGrid,
                            grid_coarse: PhaseGrid) -> DistributionField:
    """Sample a fine-grid distribution at the coincident coarse nodes.

    Requires an exact 2x refinement in both directions with the same v_max.
    The coarse ghost rows are set to boundary copies (the fine grid has no
    node at the coarse ghost velocity).
    """
    if grid_fine.n_x != 2 * grid_coarse.n_x or grid_fine.n_v != 2 * grid_coarse.n_v:
        raise ValueError(
            f"grids are not an exact 2x refinement: fine ({grid_fine.n_x}, "
            f"{grid_fine.n_v}) vs coarse ({grid_coarse.n_x}, {grid_coarse.n_v})"
        )
    if grid_fine.v_max != grid_coarse.v_max:
        raise ValueError("grids must share v_max")
    f_fine.check_shape(grid_fine)
    data = f_fine.data[::2, ::2].copy()
    return DistributionField(data=data, ghost_lo=data[:, 0].copy(),
                             ghost_hi=data[:, -1].copy())


def restrict_field(e_fine: np.ndarray, grid_fine: PhaseGrid,
                   grid_coarse: PhaseGrid) -> np.ndarray:
    """Sample a fine-grid nodal field at the coincident coarse nodes."""
    if grid_fine.n_x != 2 * grid_coarse.n_x:
        raise ValueError("grids are not an exact 2x refinement in x")
    e_fine = np.asarray(e_fine)
    if e_fine.shape != (grid_fine.n_x,):
        raise ValueError(f"field shape {e_fine.shape} does not match fine grid")
    return e_fine[::2].copy()


def pairwise_error(f_coarse: DistributionField, f_fine_restricted: DistributionField,
                   grid_coarse: PhaseGrid, q: float) -> float:
    """Weighted sup norm of (f_coarse - f_fine_restricted) on the coarse grid."""
    if f_coarse.data.shape != f_fine_restricted.data.shape:
        raise ValueError(
            f"shape mismatch: {f_coarse.data.shape} vs {f_fine_restricted.data.shape}"
        )
    diff = DistributionField(
        data=f_coarse.data - f_fine_restricted.data,
        ghost_lo=f_coarse.ghost_lo - f_fine_restricted.ghost_lo,
        ghost_hi=f_coarse.ghost_hi - f_fine_restricted.ghost_hi,
    )
    return weighted_linf_norm(diff, grid_coarse, q)


def observed_order(e_coarse: float, e_fine: float) -> float:
    """log2(e_coarse / e_fine); both inputs must be positive."""
    if not (e_coarse > 0 and e_fine > 0):
        raise ValueError(
            f"observed_order needs positive errors, got ({e_coarse}, {e_fine})"
        )
    return float(np.log2(e_coarse / e_fine))


def convergence_study(base_config: SolverConfig, levels: int,
                      keep_states: bool = False) -> ConvergenceReport:
    """Run `levels` nested resolutions of base_config and compare neighbors.

    Level L uses (n_x, n_v) = (base.n_x, base.n_v) * 2**L.  Rows are labeled
    by the coarser member of each comparison; each row's order relates its
    error to the next row's (so the finest row has an empty order).
    """
    if levels < 2:
        raise ValueError(f"a study needs at least 2 levels, got {levels}")
    states = []
    grids = []
    summaries = []
    for level in range(levels):
        config = replace(
            base_config,
            n_x=base_config.n_x * 2**level,
            n_v=base_config.n_v * 2**level,
        )
        grid = config.grid()
        try:
            state, log = run(config)
        except Exception as err:
            raise RuntimeError(
                f"level {level} (n_x={config.n_x}, n_v={config.n_v}) failed: {err}"
            ) from err
        states.append(state)
        grids.append(grid)
        summaries.append(LevelSummary(
            n_x=config.n_x,
            n_v=config.n_v,
            steps=log.steps,
            min_f=float(log.min_f.min()),
            max_mass=float(log.mass.max()),
            max_e_inf=float(log.e_inf.max()),
            wall_time=log.wall_time,
        ))

    metrics = [norm_metric_name(q) for q in base_config.q_list] + [FIELD_METRIC]
    dt_policy = "fixed" if base_config.fixed_dt else "adaptive"
    rows = []
    for lvl in range(levels - 1):
        coarse, fine = states[lvl], states[lvl + 1]
        gc, gf = grids[lvl], grids[lvl + 1]
        f_restricted = restrict_fine_to_coarse(fine.f, gf, gc)
        errors = {
            norm_metric_name(q): pairwise_error(coarse.f, f_restricted, gc, q)
            for q in base_config.q_list
        }
        errors[FIELD_METRIC] = float(
            np.max(np.abs(coarse.e - restrict_field(fine.e, gf, gc)))
        )
        rows.append(ReportRow(n_x=gc.n_x, n_v=gc.n_v, dt_policy=dt_policy,
                              errors=errors, orders={}))
    for lvl in range(len(rows) - 1):
        rows[lvl].orders = {
            m: observed_order(rows[lvl].errors[m], rows[lvl + 1].errors[m])
            for m in metrics
        }
    return ConvergenceReport(
        rows=rows,
        metrics=metrics,
        dt_policy=dt_policy,
        eps=base_config.eps,
        t_final=base_config.t_final,
        sigma=base_config.sigma,
        v_max=base_config.v_max,
        levels=summaries,
        states=states if keep_states else None,
    )
