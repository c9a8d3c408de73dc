import numpy as np
import pytest
from scipy.optimize import brentq

from builders import oscillator, table_pair
from quasisep import classifier
from quasisep.fields import (FieldSet, ZERO_GAUGE, bilinear_gauge, build_fields, gauge_phase,
                             gauge_transform, random_gauge, theorem1_fieldset, theorem1_gauge,
                             wave_gauge)
from quasisep.profiles import CubicParams, elementary_profile


def curl(fs: FieldSet, X, Y, h=1e-3):
    """A_y - B_x by 4th-order central differences."""
    def d(fn, dx, dy):
        return (-fn(X + 2 * dx, Y + 2 * dy) + 8 * fn(X + dx, Y + dy)
                - 8 * fn(X - dx, Y - dy) + fn(X - 2 * dx, Y - 2 * dy)) / (12 * h)
    return d(fs.a_pot, 0, h) - d(fs.b_pot, h, 0)


def w_from_potentials(fs, X, Y):
    a, b = fs.a_pot(X, Y), fs.b_pot(X, Y)
    return fs.v_pot(X, Y) - 0.5 * (a * a + b * b)


MESH = np.meshgrid(np.linspace(-2, 2, 50), np.linspace(-2, 2, 50), indexing="ij")


def test_harmonic_field_is_constant():
    s = oscillator()
    P, fp, gp = s.to_cubic()
    omega, w_eff, _ = build_fields(P, fp, gp)
    X, Y = MESH
    assert np.allclose(omega(X, Y), P.gamma + P.xi, atol=1e-14)
    assert np.allclose(omega(X, Y), s.Omega0, atol=1e-14)
    assert np.allclose(w_eff(X, Y), 0.5 * (X ** 2 + 4 * Y ** 2), atol=1e-12)


def test_all_zero_case():
    P = CubicParams()
    fp = elementary_profile(P, "X", "Linear", (0.3, 0.1))
    gp = elementary_profile(P, "Y", "Linear", (-0.4, 0.2))
    omega, w_eff, _ = build_fields(P, fp, gp)
    X, Y = MESH
    assert np.all(omega(X, Y) == 0.0) and np.all(w_eff(X, Y) == 0.0)


def test_effective_potential_two_ways():
    P = CubicParams(alpha=0.0, beta=1.0, gamma=0.0, mu=1.0)
    f1, slope, icpt = 0.7, 0.4, -0.3
    fp = elementary_profile(P, "X", "Exponential", (f1, 0.0))
    gp = elementary_profile(P, "Y", "Linear", (slope, icpt))
    _, w_eff, idata = build_fields(P, fp, gp)
    x, y = 0.3, -0.2
    f = f1 * np.exp(x)
    g = slope * y + icpt
    u = f - g
    W = 0.0
    W += -(P.alpha / 3.0) * u ** 3
    W += -((P.beta + P.delta) / 2.0) * u ** 2
    W += (P.xi - P.gamma + P.mu) * u
    assert float(w_eff(x, y)) == pytest.approx(W, abs=1e-14)
    m = P.beta * (f * g - f * f) - P.gamma * (2 * f - g) + P.mu * f + P.xi * g
    assert np.real(idata.m_fn(x, y)) == pytest.approx(m, abs=1e-14)
    assert float(idata.k1_fn(x, y)) == pytest.approx(-slope, abs=1e-15)
    assert float(idata.k2_fn(x, y)) == pytest.approx(-f, abs=1e-14)


def test_field_set_invariants():
    fs = oscillator().fieldset()
    X, Y = MESH
    assert np.allclose(w_from_potentials(fs, X, Y), fs.w_eff(X, Y), atol=1e-12)
    assert np.allclose(curl(fs, X, Y), fs.omega_field(X, Y), atol=1e-10)


def test_zero_gauge_is_identity():
    fs = oscillator().fieldset()
    g = gauge_transform(fs, ZERO_GAUGE)
    X, Y = MESH
    for name in ("a_pot", "b_pot", "v_pot"):
        assert np.array_equal(getattr(g, name)(X, Y), getattr(fs, name)(X, Y))


@pytest.mark.parametrize("chi", [bilinear_gauge(1.0),
                                 wave_gauge((0.5, 0.5), (1.0, 1.0), (1.0, -1.0), (0.0, 0.0))],
                         ids=["xy", "sinx_cosy"])
def test_gauge_invariants(chi):
    fs = oscillator().fieldset()
    g = gauge_transform(fs, chi)
    X, Y = MESH
    assert np.max(np.abs(w_from_potentials(g, X, Y) - fs.w_eff(X, Y))) < 1e-10
    assert np.max(np.abs(curl(g, X, Y) - curl(fs, X, Y))) < 1e-10
    assert np.max(np.abs(g.v_pot(X, Y) - fs.v_pot(X, Y))) > 1e-3


def test_sinx_cosy_wave_form():
    chi = wave_gauge((0.5, 0.5), (1.0, 1.0), (1.0, -1.0), (0.0, 0.0))
    X, Y = MESH
    assert np.allclose(chi.value(X, Y), np.sin(X) * np.cos(Y), atol=1e-14)
    assert np.allclose(chi.dx(X, Y), np.cos(X) * np.cos(Y), atol=1e-14)


def test_gauge_phase_sign():
    chi = bilinear_gauge(1.0)
    ph = gauge_phase(chi, hbar=2.0)
    assert ph(1.0, 0.5) == pytest.approx(np.exp(-0.25j), abs=1e-15)


def test_theorem1_gauge_case1():
    P = CubicParams(beta=0.0, gamma=1.0, mu=0.4)
    fp = elementary_profile(P, "X", "Quadratic", (0.2,))
    gp = elementary_profile(P, "Y", "Linear", (0.8, 0.1))
    case = classifier.classify(P, fp, gp)
    A, B, phi = theorem1_gauge(case, P, fp, gp, None)
    X, Y = MESH
    assert np.allclose(A(X, Y), 0.8, atol=1e-15)
    assert np.allclose(B(X, Y), -fp.derivatives(X, 1)[1], atol=1e-15)
    assert np.allclose(phi(X, Y), -1.0)


def test_theorem1_gauge_case3():
    # 1 + phi = sqrt(-xi/gamma) = 2
    P = CubicParams(gamma=1.0, xi=-4.0, mu=0.3)
    fp = elementary_profile(P, "X", "Quadratic", (0.0,))
    gp = elementary_profile(P, "Y", "Quadratic", (0.0,))
    case = classifier.classify(P, fp, gp)
    sc = classifier.separation_constants(case, P, fp, gp)
    A, B, phi = theorem1_gauge(case, P, fp, gp, sc)
    X, Y = MESH
    assert np.allclose(phi(X, Y), 1.0, atol=1e-14)
    assert np.allclose(A(X, Y), 0.5 * gp.derivatives(Y, 1)[1], atol=1e-14)
    assert np.allclose(B(X, Y), fp.derivatives(X, 1)[1], atol=1e-14)


def _case4(frow="F3", grow="G3"):
    P, fp, gp = table_pair(frow, grow)
    case = classifier.classify(P, fp, gp)
    sc = classifier.separation_constants(case, P, fp, gp)
    xs, ys = classifier.admissible_domain(fp, gp, sc, window=((-3, 3), (-3, 3)))
    return P, fp, gp, case, sc, xs, ys


@pytest.mark.parametrize("rows", [("F3", "G3"), ("F1", "G2"), ("F4", "G1"), ("F2", "G4")])
def test_case4_curl_matches_field(rows):
    P, fp, gp, case, sc, xs, ys = _case4(*rows)
    fs, _ = theorem1_fieldset(case, P, fp, gp, sc)
    rng = np.random.default_rng(3)
    x = rng.choice(classifier.admissible_samples(xs, 40, margin=0.2), 6)
    y = rng.choice(classifier.admissible_samples(ys, 40, margin=0.2), 6)
    err = np.abs(curl(fs, x, y) - fs.omega_field(x, y)) / np.maximum(1.0, np.abs(fs.omega_field(x, y)))
    assert err.max() < 1e-7


def test_curl_second_order_convergence():
    P, fp, gp, case, sc, xs, ys = _case4()
    fs, _ = theorem1_fieldset(case, P, fp, gp, sc)
    x = classifier.admissible_samples(xs, 5, margin=0.3)
    y = classifier.admissible_samples(ys, 5, margin=0.3)
    X, Y = np.meshgrid(x, y, indexing="ij")

    def err(h):
        c = ((fs.a_pot(X, Y + h) - fs.a_pot(X, Y - h)) - (fs.b_pot(X + h, Y) - fs.b_pot(X - h, Y))) / (2 * h)
        return np.max(np.abs(c - fs.omega_field(X, Y)))
    slope = np.log2(err(0.02) / err(0.01))
    assert abs(slope - 2.0) < 0.2


def test_random_gauges_keep_invariants():
    fs = oscillator().fieldset()
    rng = np.random.default_rng(10)
    X, Y = MESH
    for _ in range(20):
        g = gauge_transform(fs, random_gauge(rng))
        assert np.max(np.abs(w_from_potentials(g, X, Y) - fs.w_eff(X, Y))) < 1e-10
        assert np.max(np.abs(curl(g, X, Y) - curl(fs, X, Y))) < 1e-10


def test_w_constant_on_level_sets():
    P, fp, gp, case, sc, xs, ys = _case4()
    _, w_eff, _ = build_fields(P, fp, gp)
    x1, y1, x2 = 0.6, 0.5, 0.9
    u = fp(x1) - gp(y1)
    y2 = brentq(lambda t: fp(x2) - gp(t) - u, 0.05, 3.0)
    assert float(w_eff(x2, y2)) == pytest.approx(float(w_eff(x1, y1)), abs=1e-11)
