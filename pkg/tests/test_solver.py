import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from soradial.characters import character
from soradial.errors import GridTooCoarse, IncompatibleRHS, NotDominant
from soradial.quadrature import ClassFunctionGrid, QuadratureGrid, apply_radial_laplacian_grid, integrate_class, l2_norm
from soradial.solver import (SpectralExpansion, expand, reconstruct, reconstruct_grid,
                             required_grid_size, solve_poisson)
from soradial.torus import TorusAngles
from soradial.weights import SpectralLine, enumerate_dominant


def char_values(grid, lam):
    return character(SpectralLine.from_weight(grid.group, lam), grid.points)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_expand_single_character(n):
    grid = QuadratureGrid(n, 24)
    for mu in enumerate_dominant(n, 12):
        e = expand(ClassFunctionGrid(grid, char_values(grid, mu.lam)), 12)
        target = np.array([1.0 if ln.lam == mu.lam else 0.0 for ln in e.lines])
        assert np.max(np.abs(e.coeffs - target)) <= 1e-9
        assert e.residual_norm <= 1e-6


def test_expand_constant():
    grid = QuadratureGrid(4, 16)
    e = expand(ClassFunctionGrid(grid, np.ones(256)), 8)
    assert e.coefficient((0, 0)) == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(e.coeffs[1:])) <= 1e-12


def test_clebsch_gordan_so3():
    grid = QuadratureGrid(3, 32)
    e = expand(ClassFunctionGrid(grid, char_values(grid, (1,)) ** 2), 20)
    for l in range(5):
        assert e.coefficient((l,)) == pytest.approx(1.0 if l <= 2 else 0.0, abs=1e-10)


def test_reconstruct_zero_and_roundtrip(rng):
    e = SpectralExpansion.zero(5, 10)
    assert reconstruct(e, rng.uniform(-np.pi, np.pi, (7, 2))).tolist() == [0.0] * 7
    grid = QuadratureGrid(5, 20)
    values = 0.5 * char_values(grid, (1, 0)) - 2.0 * char_values(grid, (2, 1))
    e = expand(ClassFunctionGrid(grid, values), 15)
    assert np.max(np.abs(reconstruct_grid(e, grid).values - values)) <= 1e-10
    theta = TorusAngles(5, (0.4, 2.2))
    direct = 0.5 * character(SpectralLine.from_weight(5, (1, 0)), theta) - 2.0 * character(SpectralLine.from_weight(5, (2, 1)), theta)
    assert float(reconstruct(e, theta)) == pytest.approx(float(direct), abs=1e-10)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_solve_single_line(n):
    grid = QuadratureGrid(n, required_grid_size(n, 20))
    for ln in enumerate_dominant(n, 20)[1:]:
        sol = solve_poisson(ClassFunctionGrid(grid, ln.kappa * char_values(grid, ln.lam)), 20)
        target = np.array([1.0 if m.lam == ln.lam else 0.0 for m in sol.lines])
        assert np.max(np.abs(sol.coeffs - target)) <= 1e-9


def test_solve_zero_and_constant():
    grid = QuadratureGrid(4, 16)
    sol = solve_poisson(ClassFunctionGrid(grid, np.zeros(256)), 10)
    assert not np.any(sol.coeffs)
    with pytest.raises(IncompatibleRHS):
        solve_poisson(ClassFunctionGrid(grid, np.ones(256)), 10)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_solution_properties(n, rng):
    kmax = 25
    grid = QuadratureGrid(n, required_grid_size(n, kmax) + 4)
    lines = [ln for ln in enumerate_dominant(n, kmax) if ln.kappa_exact]
    values = sum(rng.normal() * character(ln, grid.points) for ln in lines)
    eta = ClassFunctionGrid(grid, values)
    sol = solve_poisson(eta, kmax)
    phi = reconstruct_grid(sol, grid)
    assert abs(integrate_class(phi)) <= 1e-10
    kappa_min = min(ln.kappa for ln in lines)
    assert l2_norm(phi) <= l2_norm(eta) / kappa_min + 1e-12
    lap = apply_radial_laplacian_grid(phi)
    ok = np.isfinite(lap) & (grid.weights > 0)
    err = np.sqrt(np.sum(grid.weights[ok] * (lap[ok] + values[ok]) ** 2))
    assert err <= 1e-8 * l2_norm(eta)


def test_truncation_residual_reported():
    grid = QuadratureGrid(3, 32)
    values = char_values(grid, (1,)) + 0.25 * char_values(grid, (6,))
    sol = solve_poisson(ClassFunctionGrid(grid, values), 10)
    assert sol.residual_norm == pytest.approx(0.25, abs=1e-10)


def test_grid_too_coarse():
    with pytest.raises(GridTooCoarse):
        expand(ClassFunctionGrid(QuadratureGrid(3, 8), np.ones(8)), 50)
    assert required_grid_size(3, 6) == 8


@given(coeffs=st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=5, max_size=5))
def test_json_roundtrip_bit_exact(coeffs):
    lines = enumerate_dominant(4, 8)
    assert len(lines) == 5
    e = SpectralExpansion(4, lines, np.array(coeffs), 8.0)
    back = SpectralExpansion.from_json(e.to_json())
    assert back.coeffs.tobytes() == e.coeffs.tobytes()
    assert [ln.lam for ln in back.lines] == [ln.lam for ln in lines]
    assert back.kappa_max == 8.0 and back.group == e.group


def test_from_dict_validation():
    doc = SpectralExpansion.zero(4, 4).to_dict()
    doc["terms"][1]["kappa"] = 99
    with pytest.raises(ValueError):
        SpectralExpansion.from_dict(doc)
    doc = SpectralExpansion.zero(4, 4).to_dict()
    doc["terms"][1]["lambda"] = [0, 1]
    with pytest.raises(NotDominant):
        SpectralExpansion.from_dict(doc)
    with pytest.raises(ValueError):
        SpectralExpansion(4, enumerate_dominant(4, 4), np.zeros(2), 4)
    with pytest.raises(KeyError):
        SpectralExpansion.zero(4, 4).coefficient((5, 0))
