"""Grid construction, node placement, and the Courant step bound."""

import numpy as np
import pytest

from vpbgk import build_grid, cfl_dt
from vpbgk.grid import TimeStepPlan, truncation_velocity


def test_reference_grid_spacings():
    g = build_grid(40, 80, 15.0)
    assert g.dx == 0.025
    assert g.dv == 0.1875
    assert g.n_v_nodes == 161


def test_node_placement():
    g = build_grid(40, 80, 15.0)
    x = g.x
    v = g.v
    assert x.shape == (40,)
    assert x[0] == 0.0
    assert x[-1] == 39 * 0.025           # node n_x would alias node 0
    assert v.shape == (161,)
    assert v[0] == -15.0 and v[-1] == 15.0
    assert v[80] == 0.0                   # the center node is exactly zero
    assert np.all(np.diff(v) == 0.1875)


def test_ghost_velocities_sit_one_spacing_outside():
    g = build_grid(8, 4, 2.0)
    assert g.v_ghost_lo == -2.5
    assert g.v_ghost_hi == 2.5


def test_column_maps_signed_indices():
    g = build_grid(4, 3, 1.0)
    assert g.column(-3) == 0
    assert g.column(0) == 3
    assert g.column(3) == 6
    with pytest.raises(IndexError):
        g.column(4)
    with pytest.raises(IndexError):
        g.column(-4)


@pytest.mark.parametrize("n_x,n_v,v_max", [(1, 4, 1.0), (4, 0, 1.0), (4, 4, 0.0),
                                           (4, 4, -2.0)])
def test_grid_rejects_bad_dimensions(n_x, n_v, v_max):
    with pytest.raises(ValueError):
        build_grid(n_x, n_v, v_max)


def test_cfl_dt_zero_field():
    # sigma / (v_max/dx) with v_max/dx = 15/0.025 = 600
    g = build_grid(40, 80, 15.0)
    assert cfl_dt(g, 0.0, 0.9) == 0.0015


def test_cfl_dt_with_field_bound():
    g = build_grid(40, 80, 15.0)
    e_max = 0.01 / (2.0 * np.pi)
    dt = cfl_dt(g, e_max, 0.9)
    assert dt == pytest.approx(0.0014999787796411278, rel=1e-15)
    # tightening the field bound can only shrink the step
    assert dt < cfl_dt(g, 0.0, 0.9)


def test_cfl_dt_validation():
    g = build_grid(10, 10, 5.0)
    with pytest.raises(ValueError):
        cfl_dt(g, 0.0, 1.0)
    with pytest.raises(ValueError):
        cfl_dt(g, 0.0, 0.0)
    with pytest.raises(ValueError):
        cfl_dt(g, -0.1, 0.9)


def test_time_step_plan_admissibility():
    g = build_grid(40, 80, 15.0)
    plan = TimeStepPlan(dt=0.0012, sigma=0.9, t_final=0.4)
    assert plan.admissible(g, e_max=0.0)
    # 0.0016 * 600 = 0.96 > 0.9
    assert not TimeStepPlan(dt=0.0016, sigma=0.9, t_final=0.4).admissible(g, 0.0)
    with pytest.raises(ValueError):
        TimeStepPlan(dt=0.0, sigma=0.9, t_final=0.4)
    with pytest.raises(ValueError):
        TimeStepPlan(dt=0.001, sigma=1.5, t_final=0.4)


def test_truncation_velocity():
    assert truncation_velocity(1.0, 0.01, gamma=0.5) == pytest.approx(10.0)
    assert truncation_velocity(2.0, 0.25, gamma=0.5) == 4.0
    with pytest.raises(ValueError):
        truncation_velocity(1.0, 0.01, gamma=0.4)
    with pytest.raises(ValueError):
        truncation_velocity(1.0, 0.01, gamma=1.0)
    with pytest.raises(ValueError):
        truncation_velocity(-1.0, 0.01)
