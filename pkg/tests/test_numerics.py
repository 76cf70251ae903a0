import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robin_disk.config import DiskConfig
from robin_disk.numerics import (
    RootFindingError,
    UnderResolvedGridError,
    default_grid_sizes,
    disk_quadrature,
    gauss_legendre,
    minimum_nodes,
    refine_root,
)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(1, 40), data=st.data())
def test_gauss_legendre_exact_through_degree_2n_minus_1(n, data):
    degree = data.draw(st.integers(0, 2 * n - 1))
    a, b = -0.3, 1.7
    x, w = gauss_legendre(n, a, b)
    # Legendre polynomials keep the check well conditioned at high degree
    p = np.polynomial.legendre.Legendre.basis(degree)((2 * x - a - b) / (b - a))
    exact = (b - a) if degree == 0 else 0.0
    assert abs(np.sum(w * p) - exact) < 1e-13


def test_gauss_legendre_nodes_inside_interval():
    x, w = gauss_legendre(64, 0.0, 2.0)
    assert np.all((x > 0) & (x < 2)) and np.all(w > 0)
    assert np.sum(w) == pytest.approx(2.0, rel=1e-15)


@pytest.mark.parametrize("n", [0, 4097])
def test_gauss_legendre_node_limits(n):
    with pytest.raises(ValueError):
        gauss_legendre(n)


@pytest.mark.parametrize(
    "f, lo, hi, root",
    [
        (lambda x: x * x - 2.0, 1.0, 2.0, math.sqrt(2.0)),
        (math.cos, 1.0, 2.0, math.pi / 2),
        (lambda x: math.exp(x) - 10.0, 0.0, 5.0, math.log(10.0)),
    ],
)
def test_refine_root_reaches_machine_precision(f, lo, hi, root):
    assert refine_root(f, lo, hi) == pytest.approx(root, rel=4e-16)


def test_refine_root_needs_sign_change():
    with pytest.raises(RootFindingError):
        refine_root(lambda x: x * x + 1.0, -1.0, 1.0)


def test_refine_root_reports_residual_failure():
    # a jump is bracketed but no root exists; the residual check catches it
    with pytest.raises(RootFindingError):
        refine_root(lambda x: -1.0 if x < 0.5 else 1.0, 0.0, 1.0, tol=1e-12, scale=1.0)


def test_disk_quadrature_integrates_polynomials_exactly():
    grid = disk_quadrature(DiskConfig(radius=1.5, l_max=2, n_max=2), 30, 16)
    rr, tt = np.meshgrid(grid.r, grid.theta, indexing="ij")
    area = grid.integrate(np.ones(grid.shape))
    assert area == pytest.approx(math.pi * 1.5**2, rel=1e-15)
    # int r^2 cos^2(theta) r dr dtheta = pi R^4 / 4
    assert grid.integrate(rr**2 * np.cos(tt) ** 2) == pytest.approx(math.pi * 1.5**4 / 4, rel=1e-14)
    assert abs(grid.integrate(rr * np.sin(3 * tt))) < 1e-14
    assert grid.integrate_ring(np.cos(grid.theta) ** 2) == pytest.approx(math.pi, rel=1e-15)
    assert grid.integrate_plain(np.ones(grid.shape)) == pytest.approx(2 * math.pi * 1.5, rel=1e-15)


def test_disk_quadrature_refuses_under_resolved_grids():
    cfg = DiskConfig(l_max=6, n_max=6)
    need_r, need_theta = minimum_nodes(cfg.l_max, 31.4)
    with pytest.raises(UnderResolvedGridError):
        disk_quadrature(cfg, need_r + 10, need_theta - 1, x_max=31.4)
    with pytest.raises(UnderResolvedGridError):
        disk_quadrature(cfg, need_r - 1, need_theta, x_max=31.4)
    disk_quadrature(cfg, need_r, need_theta, x_max=31.4)


def test_minimum_nodes_formula():
    assert minimum_nodes(6, math.pi * 10) == (37, 29)


def test_default_grid_sizes_grow_with_truncation():
    assert default_grid_sizes(6, 25.0) == (96, 64)
    n_r, n_theta = default_grid_sizes(16, 90.0)
    assert n_r >= minimum_nodes(16, 90.0)[0]
    assert n_theta >= 69 and n_theta % 2 == 0
    assert default_grid_sizes(6, 25.0, 50, 40) == (50, 40)
