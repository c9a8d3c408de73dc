import math

import numpy as np
import pytest

from quasisep import harmonic as hm
from quasisep.fields import FieldSet, gauge_phase, gauge_transform, random_gauge
from quasisep.firstorder import hermite_system
from quasisep.operators import (BoundaryContamination, ClassicalState, GridFunction, apply_H,
                                apply_X_first_order, classical_trajectory, commutator_residual,
                                d1, d2, eigen_residual, energy_drift, gaussian_tests,
                                interior, square_grid)


def zero(x, y):
    return 0.0 * x * y


FREE = FieldSet.from_potentials(zero, zero, zero, zero, 1.0, zero, zero)


def gaussian(x, y, order=4):
    return GridFunction.from_function(lambda X, Y: np.exp(-0.5 * (X * X + Y * Y)), x, y, order)


def test_free_laplacian_fourth_order():
    errs, hs = [], []
    for n in (64, 128):
        x, y = square_grid(n, 8.0)
        psi = gaussian(x, y)
        X, Y = psi.mesh
        exact = (1 - 0.5 * (X * X + Y * Y)) * psi.values
        errs.append(np.max(np.abs(interior(apply_H(FREE, psi).values - exact))))
        hs.append(psi.hx)
    slope = math.log(errs[0] / errs[1]) / math.log(hs[0] / hs[1])
    assert abs(slope - 4.0) < 0.3


@pytest.mark.parametrize("order", [2, 4, 6, 8])
def test_stencils_exact_on_polynomials(order):
    x = np.linspace(-1, 1, 41)
    h = x[1] - x[0]
    v = np.tile(x ** order, (3, 1)).T
    inner = slice(order, -order)
    assert np.allclose(d1(v, h, 0, order)[inner, 0], (order * x ** (order - 1))[inner], atol=1e-9)
    assert np.allclose(d2(v, h, 0, order)[inner, 0], (order * (order - 1) * x ** (order - 2))[inner], atol=1e-8)


def test_ground_state_residuals():
    s = hm.HarmonicSetup(1.0, 2.0, 1.0)
    lv = hm.levels(s, 0)[0]
    x, y = square_grid(256, 8 / s.tau1)
    psi = GridFunction.from_function(lambda X, Y: hm.wavefunction(s, lv, X, Y), x, y, 8)
    assert eigen_residual(lambda p: apply_H(s.fieldset(), p), psi, lv.energy) < 1e-6


def test_linearity():
    s = hm.HarmonicSetup(1.0, 2.0, 1.0)
    fs = s.fieldset()
    x, y = square_grid(96, 7.0)
    a, b = gaussian_tests(x, y, np.random.default_rng(0), count=2)
    lhs = apply_H(fs, a * (2 - 1j) + b * 0.5).values
    rhs = (2 - 1j) * apply_H(fs, a).values + 0.5 * apply_H(fs, b).values
    assert np.max(np.abs(lhs - rhs)) < 1e-12 * np.max(np.abs(rhs))


def test_gauge_covariance():
    s = hm.HarmonicSetup(1.0, 2.0, 1.0)
    chi = random_gauge(np.random.default_rng(5))
    fs, ft = s.fieldset(), gauge_transform(s.fieldset(), chi)
    x, y = square_grid(256, 7.0)
    ph = gauge_phase(chi)
    psi = gaussian(x, y, 8)
    X, Y = psi.mesh
    lhs = apply_H(ft, psi.with_values(ph(X, Y) * psi.values)).values
    rhs = ph(X, Y) * apply_H(fs, psi).values
    assert np.max(np.abs(interior(lhs - rhs))) < 1e-6


def test_first_order_multiplier_only():
    x, y = square_grid(48, 7.0)
    psi = gaussian(x, y)
    out = apply_X_first_order(FREE, lambda X, Y: 0 * X + 2.5, (0.0, 0.0, 0.0), psi)
    assert np.array_equal(out.values, 2.5 * psi.values)


def test_landau_integral_eigenvalue():
    cfo = hermite_system(1.0, 0.5)
    fs = cfo.fieldset()
    coeffs, m_fn = cfo.integral_coeffs()
    x, y = square_grid(128, 6.0)
    k = cfo.k
    psi = GridFunction.from_function(lambda X, Y: np.exp(-0.5 * X * X - 1j * k * Y), x, y, 8)
    out = apply_X_first_order(fs, m_fn, coeffs, psi, boundary_tol=None)
    assert eigen_residual(lambda p: out, psi, cfo.integral_value()) < 1e-10


def test_free_commutator_with_momentum():
    x, y = square_grid(128, 8.0)
    tests = gaussian_tests(x, y, np.random.default_rng(1), count=3)
    res = commutator_residual(FREE, lambda p, **kw: apply_X_first_order(FREE, zero, (0.0, 0.0, 1.0), p, **kw),
                              tests)
    assert res < 1e-12


def test_landau_commutator_small():
    cfo = hermite_system(1.0, 0.5)
    fs = cfo.fieldset()
    coeffs, m_fn = cfo.integral_coeffs()
    x, y = square_grid(256, 5.0)
    tests = gaussian_tests(x, y, np.random.default_rng(2), count=3, order=8)
    res = commutator_residual(fs, lambda p, **kw: apply_X_first_order(fs, m_fn, coeffs, p, **kw), tests)
    assert res < 1e-6


def test_boundary_contamination():
    x, y = square_grid(32, 2.0)
    psi = GridFunction(x, y, np.ones((32, 32)))
    with pytest.raises(BoundaryContamination):
        apply_H(FREE, psi)


def test_grid_function_validation():
    x, y = square_grid(20, 1.0)
    with pytest.raises(ValueError):
        GridFunction(x, y, np.zeros((20, 19)))
    with pytest.raises(ValueError):
        GridFunction(x, y, np.zeros((20, 20)), order=5)


def test_larmor_orbit_closes():
    s0 = ClassicalState(1.0, 0.0, 0.0, 1.0)
    path = classical_trajectory(lambda x, y: 1.0, lambda x, y: 0.0, s0, 2 * math.pi / 6000, 2 * math.pi,
                                w_grad=lambda x, y: (0.0, 0.0))
    end = path[-1]
    assert math.hypot(end.x - s0.x, end.y - s0.y) < 1e-8
    assert energy_drift(path, lambda x, y: 0.0) < 1e-10


def test_classical_state_validation():
    with pytest.raises(ValueError):
        ClassicalState(float("nan"), 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        classical_trajectory(lambda x, y: 0.0, lambda x, y: 0.0, ClassicalState(0, 0, 0, 0), -1.0, 1.0)
