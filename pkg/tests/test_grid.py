import numpy as np
import pytest

import eigenball as eb
from eigenball.grid import derivative_arrays


def test_build_grid_nodes():
    g = eb.build_grid(1.0, 2, 5)
    assert np.allclose(g.nodes, [0.0, 0.25, 0.5, 0.75, 1.0])
    assert g.nodes[0] == 0.0 and g.nodes[-1] == 1.0


def test_build_grid_spacing():
    assert eb.build_grid(2.0, 3, 3).h == 1.0
    assert eb.build_grid(1.0, 1, 101).h == pytest.approx(0.01)


def test_build_grid_rejects_bad_input():
    with pytest.raises(ValueError, match="n must be"):
        eb.build_grid(1.0, 2, 2)
    with pytest.raises(ValueError, match="R must be"):
        eb.build_grid(0.0, 2, 5)
    with pytest.raises(ValueError):
        eb.build_grid(1.0, 0, 5)


def test_boundary_distance():
    g = eb.build_grid(1.0, 2, 11)
    d = g.boundary_distance()
    assert d[0] == 1.0 and d[-1] == 0.0
    assert np.all(np.abs(np.diff(d)) <= g.h + 1e-15)


def test_constant_function_has_zero_derivatives():
    g = eb.build_grid(1.0, 2, 21)
    u = eb.GridFunction.constant(g, 7.5)
    u1, u2 = eb.discrete_derivatives(u)
    assert np.all(u1.values == 0.0)
    assert np.all(u2.values == 0.0)


def test_quadratic_is_exact_in_interior():
    g = eb.build_grid(1.0, 2, 101)
    u = eb.GridFunction(g, g.nodes**2)
    u1, u2 = eb.discrete_derivatives(u)
    assert np.allclose(u1.values[1:-1], 2.0 * g.nodes[1:-1], atol=1e-12)
    assert np.allclose(u2.values[1:-1], 2.0, atol=1e-9)
    # the reflected stencil imposes the Neumann condition structurally,
    # not the interior derivative
    assert u1.values[-1] == 0.0
    assert u1.values[0] == 0.0


def test_affine_exact_in_interior():
    g = eb.build_grid(2.0, 3, 41)
    u = eb.GridFunction(g, 3.0 - 0.5 * g.nodes)
    u1, u2 = eb.discrete_derivatives(u)
    assert np.allclose(u1.values[1:-1], -0.5, atol=1e-13)
    assert np.allclose(u2.values[1:-1], 0.0, atol=1e-10)


def test_neumann_structural_for_random_functions():
    g = eb.build_grid(1.0, 2, 31)
    rng = np.random.default_rng(0)
    for _ in range(20):
        u = eb.GridFunction(g, rng.standard_normal(g.n))
        u1, _ = eb.discrete_derivatives(u)
        assert u1.values[-1] == 0.0
        assert u1.values[0] == 0.0


def test_cos_profile_second_order_convergence():
    # Richardson-style check: halving h reduces the interior error of u'
    # by about 4x
    errs = []
    for n in (51, 101, 201):
        g = eb.build_grid(1.0, 2, n)
        u = eb.GridFunction(g, np.cos(np.pi * g.nodes))
        u1, _ = eb.discrete_derivatives(u)
        exact = -np.pi * np.sin(np.pi * g.nodes)
        errs.append(np.abs(u1.values[1:-1] - exact[1:-1]).max())
    assert u1.values[-1] == 0.0  # matches the analytic Neumann-compatible slope
    for e_coarse, e_fine in zip(errs, errs[1:]):
        assert 3.0 < e_coarse / e_fine < 5.0


def test_lipschitz_quotient_cases():
    g = eb.build_grid(1.0, 2, 101)
    assert eb.lipschitz_quotient(eb.GridFunction.constant(g, 5.0)) == 0.0
    assert eb.lipschitz_quotient(eb.GridFunction(g, g.nodes)) == pytest.approx(1.0)
    # max adjacent slope of r^2 on a uniform grid of [0, 1] is 2 - h
    quad = eb.GridFunction(g, g.nodes**2)
    assert eb.lipschitz_quotient(quad) == pytest.approx(2.0 - g.h, rel=1e-12)


def test_gridfunction_validation():
    g = eb.build_grid(1.0, 2, 5)
    with pytest.raises(ValueError, match="expected 5 values"):
        eb.GridFunction(g, np.zeros(4))
    with pytest.raises(ValueError, match="finite"):
        eb.GridFunction(g, [0.0, 1.0, np.nan, 0.0, 1.0])


def test_csv_roundtrip(tmp_path):
    g = eb.build_grid(1.0, 3, 17)
    u = eb.GridFunction(g, np.sin(3.0 * g.nodes) + 1e-17)
    path = tmp_path / "u.csv"
    u.to_csv(path)
    text = path.read_text()
    assert text.startswith("r,u\n")
    assert "\r" not in text
    back = eb.GridFunction.from_csv(path, N_dim=3)
    assert back.grid.n == g.n and back.grid.R == g.R
    assert np.array_equal(back.values, u.values)


def test_refine_halves_spacing():
    g = eb.build_grid(1.0, 2, 101)
    f = g.refine()
    assert f.n == 201
    assert f.h == pytest.approx(g.h / 2)
    assert np.allclose(f.nodes[::2], g.nodes)


def test_derivative_arrays_matches_public_wrapper():
    g = eb.build_grid(1.0, 2, 33)
    vals = np.cos(2.0 * g.nodes)
    u1a, u2a = derivative_arrays(vals, g.h)
    u1b, u2b = eb.discrete_derivatives(eb.GridFunction(g, vals))
    assert np.array_equal(u1a, u1b.values)
    assert np.array_equal(u2a, u2b.values)
