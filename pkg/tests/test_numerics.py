import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualseries.errors import GridTooCoarse, InvalidParam, NonDecomposable
from dualseries.numerics import (
    IDENTITY2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    TimeGrid,
    central_difference,
    cumulative_left_product,
    cumulative_quadrature,
    expm_taylor,
    from_pauli,
    mat_exp_su2,
    pauli_components,
    polar_correct,
    unitarity_defect,
)


def taylor_exp(a, terms=12, squarings=6):
    """Plain scaled Taylor series, written out independently of expm_taylor."""
    b = a / 2**squarings
    out = np.eye(a.shape[-1], dtype=complex)
    term = np.eye(a.shape[-1], dtype=complex)
    for k in range(1, terms + 1):
        term = term @ b / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def test_time_grid_points_and_validation():
    g = TimeGrid(0.0, 2.0, 4)
    assert np.allclose(g.points, [0, 0.5, 1, 1.5, 2])
    assert len(g) == 5 and g.dt == 0.5
    assert g.index_of(1.5) == 3
    assert g.refined(3).steps == 12
    with pytest.raises(InvalidParam):
        TimeGrid(1.0, 1.0, 10)
    with pytest.raises(InvalidParam):
        TimeGrid(0.0, 1.0, 0)
    with pytest.raises(InvalidParam):
        g.index_of(0.3)


def test_exp_of_zero_is_identity():
    assert np.array_equal(mat_exp_su2(np.zeros((2, 2))), IDENTITY2)


def test_exp_quarter_turn():
    u = mat_exp_su2(1j * math.pi / 2 * SIGMA_X)
    assert np.allclose(u, 1j * SIGMA_X, atol=1e-15)


def test_exp_matches_taylor_reference():
    a = 1j * 0.35 * SIGMA_Z
    assert np.abs(mat_exp_su2(a) - taylor_exp(a)).max() <= 1e-13


def test_exp_with_scalar_part_and_stacks():
    a = np.stack([1j * (0.3 * IDENTITY2 + 0.2 * SIGMA_Y - 1.1 * SIGMA_X), 1j * 2.0 * SIGMA_Z])
    assert np.abs(mat_exp_su2(a) - np.stack([taylor_exp(x) for x in a])).max() <= 1e-13


def test_exp_rejects_non_antihermitian():
    with pytest.raises(NonDecomposable):
        mat_exp_su2(SIGMA_X)
    with pytest.raises(NonDecomposable):
        mat_exp_su2(np.zeros((3, 3)))


def test_expm_taylor_general_dimension():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert np.abs(expm_taylor(a) @ expm_taylor(-a) - np.eye(4)).max() < 1e-12


@settings(max_examples=1000, deadline=None)
@given(st.lists(st.floats(-20, 20, allow_nan=False), min_size=4, max_size=4))
def test_exp_inverse_property(c):
    a = 1j * from_pauli(c[0], np.array(c[1:]))
    assert np.abs(mat_exp_su2(a) @ mat_exp_su2(-a) - IDENTITY2).max() <= 1e-13


def test_pauli_round_trip():
    rng = np.random.default_rng(2)
    m = rng.normal(size=(5, 2, 2)) + 1j * rng.normal(size=(5, 2, 2))
    c0, c = pauli_components(m)
    assert np.allclose(from_pauli(c0, c), m)


def test_unitarity_defect_examples():
    assert unitarity_defect(IDENTITY2) == 0.0
    assert unitarity_defect(2 * IDENTITY2) == pytest.approx(3.0)
    assert unitarity_defect(np.stack([IDENTITY2, SIGMA_X])).shape == (2,)


def test_quadrature_constant():
    g = TimeGrid(0.0, 1.0, 100)
    f = np.broadcast_to(IDENTITY2, (len(g), 2, 2))
    assert np.abs(cumulative_quadrature(f, g.dt)[-1] - IDENTITY2).max() <= 1e-12


def test_quadrature_polynomial_exact():
    g = TimeGrid(0.0, 1.0, 101)  # odd step count exercises the tail formula
    t = g.points
    out = cumulative_quadrature(2 * t[:, None, None] * IDENTITY2, g.dt)
    assert np.abs(out - (t**2)[:, None, None] * IDENTITY2).max() <= 1e-10


def test_quadrature_complex_exponential():
    g = TimeGrid(0.0, 2 * math.pi, 2000)
    t = g.points
    out = cumulative_quadrature(np.exp(1j * t), g.dt)
    assert np.abs(out - (np.exp(1j * t) - 1) / 1j).max() <= 1e-9


def test_quadrature_convergence_order():
    errs = []
    for n in (50, 100, 200):
        g = TimeGrid(0.0, 2 * math.pi, n)
        t = g.points
        errs.append(np.abs(cumulative_quadrature(np.exp(1j * t), g.dt) - (np.exp(1j * t) - 1) / 1j).max())
    assert errs[0] / errs[1] >= 8 and errs[1] / errs[2] >= 8


def test_quadrature_linear():
    rng = np.random.default_rng(3)
    f = rng.normal(size=(41, 2, 2)) + 1j * rng.normal(size=(41, 2, 2))
    h = rng.normal(size=(41, 2, 2))
    a, b = 0.7 - 0.2j, -1.3
    lhs = cumulative_quadrature(a * f + b * h, 0.1)
    rhs = a * cumulative_quadrature(f, 0.1) + b * cumulative_quadrature(h, 0.1)
    assert np.abs(lhs - rhs).max() <= 1e-12


def test_quadrature_needs_two_steps():
    with pytest.raises(GridTooCoarse):
        cumulative_quadrature(np.ones(2), 0.1)


def test_central_difference_quadratic_exact():
    t = np.linspace(0, 1, 11)
    assert np.allclose(central_difference(t**2, 0.1), 2 * t)


def test_left_product_order():
    rng = np.random.default_rng(4)
    f = rng.normal(size=(7, 2, 2)) + 0j
    p = cumulative_left_product(f)
    ref = f[0]
    for k in range(1, 7):
        ref = f[k] @ ref
        assert np.allclose(p[k], ref)


def test_polar_correct_removes_small_defect():
    u = mat_exp_su2(1j * 0.4 * SIGMA_Y) * (1 + 1e-9)
    fixed = polar_correct(u)
    assert unitarity_defect(fixed) < 1e-15
    assert np.abs(fixed - u).max() < 1e-8
