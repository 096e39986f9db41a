"""Time loop: initialization, stepping, determinism, and an independent
re-implementation of one full step used as an oracle."""

import numpy as np
import pytest

from vpbgk import (
    SolverConfig,
    TabulatedIC,
    UniformMaxwellianIC,
    advance_step,
    build_grid,
    green_kernel,
    initialize,
    run,
)

REFERENCE = dict(n_x=40, n_v=80, v_max=15.0, eps=1.0, t_final=0.4, sigma=0.9)


def test_initial_mass_is_one():
    # the cosine ripple integrates to zero on the periodic nodes, and the
    # Gaussian quadrature defect is far below double precision
    cfg = SolverConfig(**REFERENCE)
    state = initialize(cfg, cfg.grid())
    grid = cfg.grid()
    mass = state.f.data.sum() * grid.dv * grid.dx
    assert abs(mass - 1.0) < 1e-8
    assert state.f.data.min() > 0.0


def test_initial_ghosts_carry_the_boundary_value():
    cfg = SolverConfig(**REFERENCE)
    g = cfg.grid()
    state = initialize(cfg, g)
    # ripple IC: ghost rows hold f0(x_i, +-v_max), i.e. the boundary column
    assert np.array_equal(state.f.ghost_lo, state.f.data[:, 0])
    assert np.array_equal(state.f.ghost_hi, state.f.data[:, -1])


def test_uniform_state_is_nearly_stationary():
    cfg = SolverConfig(n_x=40, n_v=80, v_max=15.0, eps=1.0, t_final=1.0,
                      sigma=0.9, initial_condition=UniformMaxwellianIC())
    g = cfg.grid()
    s0 = initialize(cfg, g)
    assert np.max(np.abs(s0.e)) < 1e-12
    s1 = advance_step(s0, g, cfg)
    assert np.max(np.abs(s1.f.data - s0.f.data)) < 1e-12
    assert np.max(np.abs(s1.e)) < 1e-12


def test_reference_run_step_count_and_final_time():
    state, log = run(SolverConfig(**REFERENCE))
    assert log.steps == 267
    assert state.t == 0.4                 # lands on t_final exactly
    assert log.t.shape == (268,)
    assert log.dt.shape == (267,)
    assert abs(log.dt.sum() - 0.4) < 1e-14
    assert log.dt_policy == "adaptive"
    # the final truncated step is strictly shorter than the CFL step
    assert log.dt[-1] < log.dt[0]
    assert log.min_f.min() > 0.0


def test_diagnostics_cadence():
    cfg = SolverConfig(**REFERENCE, diagnostics_every=50)
    state, log = run(cfg)
    assert [r.step for r in log.records] == [0, 50, 100, 150, 200, 250, 267]
    assert log.records[-1].t == 0.4
    # mass column of the cheap trace matches the full records where they meet
    assert log.records[0].mass == log.mass[0]


def test_zero_final_time_runs_zero_steps():
    cfg = SolverConfig(n_x=10, n_v=10, v_max=5.0, eps=1.0, t_final=0.0,
                      sigma=0.9)
    state, log = run(cfg)
    assert log.steps == 0
    assert state.t == 0.0
    assert log.t.shape == (1,)
    assert len(log.records) == 1
    assert log.e_inf.shape == (1,)


def test_runs_are_bitwise_deterministic():
    cfg = SolverConfig(n_x=16, n_v=20, v_max=6.0, eps=0.3, t_final=0.05,
                      sigma=0.9)
    s_a, log_a = run(cfg)
    s_b, log_b = run(cfg)
    assert np.array_equal(s_a.f.data, s_b.f.data)
    assert np.array_equal(s_a.e, s_b.e)
    assert np.array_equal(log_a.mass, log_b.mass)
    assert np.array_equal(log_a.dt, log_b.dt)


def test_fixed_dt_policy():
    cfg = SolverConfig(n_x=16, n_v=20, v_max=6.0, eps=0.3, t_final=0.05,
                      sigma=0.9, fixed_dt=True)
    state, log = run(cfg)
    assert log.dt_policy == "fixed"
    # every step equals the initial-field value except the truncated last one
    # (the trace records differences of accumulated times, hence the 1-ulp slack)
    assert np.max(np.abs(log.dt[:-1] - log.dt[0])) < 1e-17
    assert log.dt[-1] <= log.dt[0]
    assert state.t == 0.05


def test_tabulated_ic_round_trips_through_initialize():
    g = build_grid(6, 8, 2.0)
    rng = np.random.RandomState(2)
    values = rng.rand(6, 17) + 0.5
    cfg = SolverConfig(n_x=6, n_v=8, v_max=2.0, eps=1.0, t_final=0.1,
                      sigma=0.9, initial_condition=TabulatedIC(values=values))
    state = initialize(cfg, g)
    assert np.array_equal(state.f.data, values)
    assert np.array_equal(state.f.ghost_lo, values[:, 0])


def test_initialize_rejects_mismatched_grid():
    cfg = SolverConfig(n_x=10, n_v=10, v_max=5.0, eps=1.0, t_final=0.1,
                      sigma=0.9)
    with pytest.raises(ValueError):
        initialize(cfg, build_grid(20, 10, 5.0))


def test_advance_step_refuses_past_final_time():
    cfg = SolverConfig(n_x=10, n_v=10, v_max=5.0, eps=1.0, t_final=0.0,
                      sigma=0.9)
    g = cfg.grid()
    state = initialize(cfg, g)
    with pytest.raises(ValueError):
        advance_step(state, g, cfg)


def test_one_step_against_naive_reimplementation():
    """Full step vs a from-scratch flux-form evaluation of the same scheme.

    density -> kernel-sum field -> upwind flux differences -> moments ->
    closed-form relaxation, all in plain Python/numpy.  The field sum uses
    the same ascending-k order, so it must match bitwise; the swept f is
    allowed last-bit rounding wiggle.
    """
    cfg = SolverConfig(n_x=8, n_v=6, v_max=3.0, eps=0.8, t_final=1.0,
                      sigma=0.9)
    g = cfg.grid()
    s0 = initialize(cfg, g)
    dt = 0.004
    s1 = advance_step(s0, g, cfg, dt=dt)

    f = s0.f.data
    v = g.v
    m = g.n_v_nodes

    m0 = np.array([sum(f[i, j] * g.dv for j in range(m)) for i in range(8)])
    e = np.array([sum(green_kernel(g.x[i], g.x[k]) * (m0[k] - 1.0) * g.dx
                      for k in range(8)) for i in range(8)])
    assert np.array_equal(e, s1.e)

    vp, vm = np.maximum(v, 0.0), np.minimum(v, 0.0)
    ep, em = np.maximum(e, 0.0), np.minimum(e, 0.0)
    fw = np.roll(f, 1, axis=0)
    fe = np.roll(f, -1, axis=0)
    fs = np.concatenate([s0.f.ghost_lo[:, None], f[:, :-1]], axis=1)
    fn = np.concatenate([f[:, 1:], s0.f.ghost_hi[:, None]], axis=1)
    f_tilde = (f
               - dt / g.dx * ((vp * f + vm * fe) - (vp * fw + vm * f))
               - dt / g.dv * ((ep[:, None] * f + em[:, None] * fn)
                              - (ep[:, None] * fs + em[:, None] * f)))

    m0t = np.array([sum(f_tilde[i, j] * g.dv for j in range(m)) for i in range(8)])
    m1t = np.array([sum(v[j] * f_tilde[i, j] * g.dv for j in range(m))
                    for i in range(8)])
    m2t = np.array([sum(v[j] ** 2 * f_tilde[i, j] * g.dv for j in range(m))
                    for i in range(8)])
    u = m1t / m0t
    temp = (m2t - m0t * u * u) / m0t
    maxw = (m0t[:, None] / np.sqrt(2.0 * np.pi * temp)[:, None]
            * np.exp(-(v[None, :] - u[:, None]) ** 2 / (2.0 * temp[:, None])))
    f_new = (cfg.eps * f_tilde + dt * maxw) / (cfg.eps + dt)

    assert np.allclose(s1.f.data, f_new, rtol=0, atol=1e-15)
    # macro moments reported on the state describe the post-transport f
    assert np.allclose(s1.macro.rho, m0t, rtol=1e-13, atol=0)


def test_run_attaches_step_context_to_failures():
    # an unreachable t_final with a huge fixed dt trips the Courant guard
    g_cfg = SolverConfig(n_x=10, n_v=10, v_max=5.0, eps=1.0, t_final=0.5,
                        sigma=0.9)
    grid = g_cfg.grid()
    state = initialize(g_cfg, grid)
    from vpbgk import CflViolation

    with pytest.raises(CflViolation):
        advance_step(state, grid, g_cfg, dt=0.4)


def test_config_validation():
    good = dict(n_x=10, n_v=10, v_max=5.0, eps=1.0, t_final=0.1, sigma=0.9)
    SolverConfig(**good)
    for key, bad in [("n_x", 1), ("n_v", 0), ("v_max", 0.0), ("eps", 0.0),
                     ("t_final", -1.0), ("sigma", 1.0), ("sigma", 0.0)]:
        with pytest.raises(ValueError):
            SolverConfig(**{**good, key: bad})
    with pytest.raises(ValueError):
        SolverConfig(**good, q_list=(3.0,))
    with pytest.raises(ValueError):
        SolverConfig(**good, diagnostics_every=-1)
