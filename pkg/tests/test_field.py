"""Field solve: kernel values, exact identities, and the analytic oracle."""

import numpy as np
import pytest

from vpbgk import build_grid, electric_field, green_kernel


def test_green_kernel_values():
    assert green_kernel(0.5, 0.25) == 0.25
    assert green_kernel(0.5, 0.75) == -0.25
    for x in (0.0, 0.3, 0.5, 1.0):
        assert green_kernel(x, 0.0) == 0.0
    assert green_kernel(1.0, 1.0) == 1.0   # y <= x branch at the corner
    assert green_kernel(0.0, 1.0) == 0.0   # y - 1 branch


def test_green_kernel_domain():
    with pytest.raises(ValueError):
        green_kernel(-0.1, 0.5)
    with pytest.raises(ValueError):
        green_kernel(0.5, 1.2)


def test_unit_density_gives_exactly_zero_field():
    g = build_grid(64, 2, 1.0)
    e = electric_field(g, np.ones(64))
    assert np.array_equal(e, np.zeros(64))


def test_density_spike_reproduces_kernel_column():
    """A single-node excess of weight 1/dx turns the sum into one kernel term.

    With n_x = 8 the products (1/dx)*dx are exact in binary, so the field
    must equal the kernel column bitwise.
    """
    g = build_grid(8, 2, 1.0)
    rho = np.ones(8)
    rho[3] += 8.0                     # 1/dx
    e = electric_field(g, rho)
    expected = np.array([green_kernel(x, g.x[3]) for x in g.x])
    assert np.array_equal(e, expected)
    assert np.array_equal(e, np.array([-0.625, -0.625, -0.625,
                                       0.375, 0.375, 0.375, 0.375, 0.375]))


def test_cosine_density_matches_analytic_field():
    # rho = 1 + 0.01 cos(2 pi x)  =>  E = 0.01 sin(2 pi x) / (2 pi)
    g = build_grid(640, 2, 1.0)
    rho = 1.0 + 0.01 * np.cos(2.0 * np.pi * g.x)
    e = electric_field(g, rho)
    exact = 0.01 * np.sin(2.0 * np.pi * g.x) / (2.0 * np.pi)
    err = np.max(np.abs(e - exact))
    assert err <= 5.0 * g.dx * 0.01
    # measured headroom: the error sits at about a tenth of the bound
    assert err < 1.0e-5


def test_prefix_sum_path_agrees_with_direct_sum():
    rng = np.random.RandomState(7)
    g = build_grid(137, 2, 1.0)
    rho = 1.0 + 0.2 * rng.rand(137)
    direct = electric_field(g, rho)
    fast = electric_field(g, rho, use_prefix_sum=True)
    assert np.max(np.abs(direct - fast)) < 1e-13


def test_field_mean_is_tiny_for_neutral_density():
    # the kernel construction keeps the field mean-free up to rounding
    rng = np.random.RandomState(11)
    g = build_grid(50, 2, 1.0)
    rho = 1.0 + 0.1 * rng.randn(50)
    rho -= rho.mean() - 1.0           # enforce neutrality exactly-ish
    e = electric_field(g, rho)
    assert abs(e.mean()) < 1e-14


def test_electric_field_input_validation():
    g = build_grid(10, 2, 1.0)
    with pytest.raises(ValueError):
        electric_field(g, np.ones(9))
    bad = np.ones(10)
    bad[4] = np.nan
    with pytest.raises(ValueError):
        electric_field(g, bad)
