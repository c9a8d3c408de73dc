"""Magnetic field, effective potential and gauge potentials.

A field configuration is kept as evaluators (callables of x, y) so every
quantity stays exact; grids are produced only by the numerical layers.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .classifier import (NotQuasiseparable, SeparationConstants, TheoremCase,
                         phi_factors)
from .profiles import CubicParams, Profile

Fn = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _zero(x, y):
    return np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)


@dataclass(frozen=True)
class FieldSet:
    """Everything the Hamiltonian needs: A, B, V (and the invariants Omega, W).

    ``a_x`` and ``b_y`` are optional exact derivatives of A and B used by the
    operator layer; when absent it falls back to finite differences.
    """

    hbar: float
    omega_field: Fn
    w_eff: Fn
    a_pot: Fn
    b_pot: Fn
    v_pot: Fn
    a_x: Fn | None = None
    b_y: Fn | None = None

    @classmethod
    def from_potentials(cls, omega_field: Fn, w_eff: Fn, a_pot: Fn, b_pot: Fn,
                        hbar: float = 1.0, a_x: Fn | None = None, b_y: Fn | None = None):
        """Close the set with V = W + (A^2 + B^2)/2."""
        def v_pot(x, y):
            a, b = a_pot(x, y), b_pot(x, y)
            return w_eff(x, y) + 0.5 * (a * a + b * b)
        return cls(hbar, omega_field, w_eff, a_pot, b_pot, v_pot, a_x, b_y)

    def sample(self, x, y) -> dict:
        X, Y = np.meshgrid(np.asarray(x, float), np.asarray(y, float), indexing="ij")
        return {"x": X, "y": Y, "omega": self.omega_field(X, Y), "w": self.w_eff(X, Y),
                "a": self.a_pot(X, Y), "b": self.b_pot(X, Y), "v": self.v_pot(X, Y)}


@dataclass(frozen=True)
class IntegralData:
    """Coefficient functions m, k1 = -g'(y), k2 = -f'(x) of the integral X."""

    m_fn: Fn
    k1_fn: Fn
    k2_fn: Fn


@dataclass(frozen=True)
class GaugeFunction:
    """A gauge function chi with its first and pure second derivatives."""

    value: Fn
    dx: Fn
    dy: Fn
    dxx: Fn
    dyy: Fn


ZERO_GAUGE = GaugeFunction(_zero, _zero, _zero, _zero, _zero)


def bilinear_gauge(c: float = 1.0) -> GaugeFunction:
    """chi = c x y."""
    return GaugeFunction(lambda x, y: c * x * y, lambda x, y: c * y + 0 * x,
                         lambda x, y: c * x + 0 * y, _zero, _zero)


def wave_gauge(amps, kx, ky, phases, quad=(0.0, 0.0, 0.0)) -> GaugeFunction:
    """chi = sum a_j sin(kx_j x + ky_j y + p_j) + q0 x^2 + q1 x y + q2 y^2."""
    amps, kx, ky, phases = (np.asarray(v, float) for v in (amps, kx, ky, phases))
    q0, q1, q2 = quad

    def arg(x, y):
        return np.multiply.outer(x, kx) + np.multiply.outer(y, ky) + phases

    def value(x, y):
        return (amps * np.sin(arg(x, y))).sum(-1) + q0 * x * x + q1 * x * y + q2 * y * y

    def dx(x, y):
        return (amps * kx * np.cos(arg(x, y))).sum(-1) + 2 * q0 * x + q1 * y

    def dy(x, y):
        return (amps * ky * np.cos(arg(x, y))).sum(-1) + q1 * x + 2 * q2 * y

    def dxx(x, y):
        return -(amps * kx * kx * np.sin(arg(x, y))).sum(-1) + 2 * q0 + 0 * x * y

    def dyy(x, y):
        return -(amps * ky * ky * np.sin(arg(x, y))).sum(-1) + 2 * q2 + 0 * x * y

    return GaugeFunction(value, dx, dy, dxx, dyy)


def random_gauge(rng: np.random.Generator, waves: int = 3) -> GaugeFunction:
    """A smooth random gauge function of moderate size."""
    return wave_gauge(rng.uniform(-1, 1, waves), rng.uniform(-2, 2, waves),
                      rng.uniform(-2, 2, waves), rng.uniform(0, 2 * np.pi, waves),
                      tuple(rng.uniform(-0.3, 0.3, 3)))


def gauge_transform(fs: FieldSet, chi: GaugeFunction) -> FieldSet:
    """A -> A + chi_x, B -> B + chi_y, V -> V + (A, grad chi) + |grad chi|^2/2.

    Wavefunctions transform as psi -> exp(-i chi/hbar) psi.
    """
    def a_pot(x, y):
        return fs.a_pot(x, y) + chi.dx(x, y)

    def b_pot(x, y):
        return fs.b_pot(x, y) + chi.dy(x, y)

    def v_pot(x, y):
        cx, cy = chi.dx(x, y), chi.dy(x, y)
        return fs.v_pot(x, y) + fs.a_pot(x, y) * cx + fs.b_pot(x, y) * cy + 0.5 * (cx * cx + cy * cy)

    a_x = None if fs.a_x is None else (lambda x, y: fs.a_x(x, y) + chi.dxx(x, y))
    b_y = None if fs.b_y is None else (lambda x, y: fs.b_y(x, y) + chi.dyy(x, y))
    return FieldSet(fs.hbar, fs.omega_field, fs.w_eff, a_pot, b_pot, v_pot, a_x, b_y)


def gauge_phase(chi: GaugeFunction, hbar: float = 1.0) -> Fn:
    """Factor multiplying wavefunctions under ``gauge_transform``."""
    return lambda x, y: np.exp(-1j * chi.value(x, y) / hbar)


# ---------------------------------------------------------------------------
# Second-order Cartesian systems

def build_fields(params: CubicParams, fp: Profile, gp: Profile):
    """Omega, W and the integral coefficients (m, k1, k2) for a profile pair."""
    a, b, c = params.alpha, params.beta, params.gamma
    d, xi, mu = params.delta, params.xi, params.mu

    def omega(x, y):
        return fp.derivatives(x, 2)[2] + gp.derivatives(y, 2)[2]

    def w_eff(x, y):
        u = fp(x) - gp(y)
        return -(a / 3.0) * u ** 3 - 0.5 * (b + d) * u * u + (xi - c + mu) * u

    def m_fn(x, y):
        f, g = fp(x), gp(y)
        return (-(a / 3.0) * (g ** 3 + 2 * f ** 3 - 3 * g * f * f) + b * (f * g - f * f)
                - 0.5 * d * (f * f - g * g) - c * (2 * f - g) + mu * f + xi * g)

    def k1(x, y):
        return -gp.derivatives(y, 1)[1] + 0 * np.asarray(x, float)

    def k2(x, y):
        return -fp.derivatives(x, 1)[1] + 0 * np.asarray(y, float)

    return omega, w_eff, IntegralData(m_fn, k1, k2)


def theorem1_gauge(case: TheoremCase, params: CubicParams, fp: Profile, gp: Profile,
                   constants: SeparationConstants | None, tau: Fn | None = None,
                   eta: Fn | None = None):
    """Vector potential (A, B) and multiplier phi for a separable case.

    Returns three callables.  phi = -1 cases use A = g' + tau, B = -f'.
    Others use A = tau + phi g'/(1 + phi), B = eta + phi f'.
    """
    return _gauge_parts(case, params, fp, gp, constants, tau, eta)[:3]


def _gauge_parts(case, params, fp, gp, sc, tau, eta):
    if not case.separable:
        raise NotQuasiseparable(case.note or "configuration is not quasiseparable")
    tau = tau or _zero
    eta = eta or _zero
    if case.phi_kind == "ConstantMinusOne":
        def A(x, y):
            return gp.derivatives(y, 1)[1] + tau(x, y) + 0 * np.asarray(x, float)

        def B(x, y):
            return -fp.derivatives(x, 1)[1] + eta(x, y) + 0 * np.asarray(y, float)

        def phi(x, y):
            return -np.ones(np.broadcast(np.asarray(x), np.asarray(y)).shape)

        def A_x(x, y):
            return _zero(x, y)

        def B_y(x, y):
            return _zero(x, y)

        return A, B, phi, A_x, B_y
    if sc is None:
        raise NotQuasiseparable("separation constants required for phi != -1")

    def parts(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        flat_x, flat_y = x.ravel(), y.ravel()
        P, dP, Q, dQ = phi_factors(fp, gp, sc, flat_x, flat_y)
        fd = fp.derivatives(flat_x, 1)[1]
        gd = gp.derivatives(flat_y, 1)[1]
        return x.shape, P, dP, Q, dQ, fd, gd

    def A(x, y):
        shape, P, _, Q, _, _, gd = parts(x, y)
        return (gd - gd / (P * Q)).reshape(shape) + tau(x, y)

    def B(x, y):
        shape, P, _, Q, _, fd, _ = parts(x, y)
        return ((P * Q - 1.0) * fd).reshape(shape) + eta(x, y)

    def phi(x, y):
        shape, P, _, Q, _, _, _ = parts(x, y)
        return (P * Q - 1.0).reshape(shape)

    def A_x(x, y):
        shape, P, dP, Q, _, _, gd = parts(x, y)
        return (gd * dP / (P * P * Q)).reshape(shape)

    def B_y(x, y):
        shape, P, _, Q, dQ, fd, _ = parts(x, y)
        return (fd * P * dQ).reshape(shape)

    return A, B, phi, A_x, B_y


def theorem1_fieldset(case: TheoremCase, params: CubicParams, fp: Profile, gp: Profile,
                      constants: SeparationConstants | None, hbar: float = 1.0,
                      params_for_w: CubicParams | None = None):
    """FieldSet and IntegralData in the separating gauge.

    ``params_for_w`` replaces the parameters entering W only (used to build
    deliberately broken configurations for negative controls).
    """
    A, B, _, A_x, B_y = _gauge_parts(case, params, fp, gp, constants, None, None)
    omega, w_eff, idata = build_fields(params, fp, gp)
    if params_for_w is not None:
        w_eff = build_fields(params_for_w, fp, gp)[1]
    fs = FieldSet.from_potentials(omega, w_eff, A, B, hbar, A_x, B_y)
    return fs, idata


def with_hbar(fs: FieldSet, hbar: float) -> FieldSet:
    return replace(fs, hbar=hbar)


# ---------------------------------------------------------------------------
# Two reference configurations

def harmonic_fieldset(omega1: float, omega2: float, Omega0: float, hbar: float = 1.0) -> FieldSet:
    """Constant field with anisotropic oscillator W in the separating gauge."""
    D = omega1 + omega2

    def a_pot(x, y):
        return omega2 * Omega0 / D * y + 0 * x

    def b_pot(x, y):
        return -omega1 * Omega0 / D * x + 0 * y

    return FieldSet.from_potentials(lambda x, y: Omega0 + _zero(x, y),
                                    lambda x, y: 0.5 * (omega1 ** 2 * x * x + omega2 ** 2 * y * y),
                                    a_pot, b_pot, hbar, _zero, _zero)


def landau_fieldset(m: Callable, dm: Callable, w: Callable, hbar: float = 1.0) -> FieldSet:
    """First-order integrable Cartesian system: Omega = m'(x), gauge A = 0, B = -m(x)."""
    return FieldSet.from_potentials(lambda x, y: dm(x) + _zero(x, y), lambda x, y: w(x) + _zero(x, y),
                                    _zero, lambda x, y: -m(x) + _zero(x, y), hbar, _zero, _zero)


def polar_fieldset(m: Callable, dm: Callable, w: Callable, hbar: float = 1.0) -> FieldSet:
    """Polar first-order system: Omega = -m'(r)/r, gauge A = -m y/r^2, B = m x/r^2."""
    def r_of(x, y):
        return np.hypot(x, y)

    def a_pot(x, y):
        r = r_of(x, y)
        return -m(r) * y / (r * r)

    def b_pot(x, y):
        r = r_of(x, y)
        return m(r) * x / (r * r)

    def a_x(x, y):
        r = r_of(x, y)
        return -y * x * (dm(r) / r - 2 * m(r) / (r * r)) / (r * r)

    def b_y(x, y):
        r = r_of(x, y)
        return x * y * (dm(r) / r - 2 * m(r) / (r * r)) / (r * r)

    return FieldSet.from_potentials(lambda x, y: -dm(r_of(x, y)) / r_of(x, y),
                                    lambda x, y: w(r_of(x, y)), a_pot, b_pot, hbar, a_x, b_y)
