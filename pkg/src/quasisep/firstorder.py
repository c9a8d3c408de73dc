"""Systems with a first-order integral: Cartesian and polar separation.

Cartesian: Omega = m'(x), W = W(x), gauge A = 0, B = -m.  With
psi = f(x) exp(-i k y / hbar) the x equation is a 1D Schrodinger problem in
U(x) = k^2/2 + k m + W + m^2/2, and X = P2 + m + B acts as -k.

Polar: Omega = -m'(r)/r, gauge A = -m y/r^2, B = m x/r^2.  With
psi = exp(-i M theta) u(r) the radial problem has the centrifugal term
(hbar M - m)^2 / (2 r^2), and X = L3 + y A - x B + m acts as -hbar M.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .fields import FieldSet, landau_fieldset, polar_fieldset
from .harmonic import hermite

RICHARDSON_TOL = 1e-3


class NotConfining(ValueError):
    """Effective potential too low at the domain ends for the requested levels."""


class NotConverged(ArithmeticError):
    """Two-grid estimates disagree by more than the acceptance threshold."""


class InvalidWavenumber(ValueError):
    """k <= 0 makes the Hermite scale complex."""


@dataclass(frozen=True)
class CartesianFirstOrder:
    m: Callable
    dm: Callable
    w: Callable
    k: float
    hbar: float = 1.0

    def u_potential(self, x):
        x = np.asarray(x, dtype=float)
        m = self.m(x)
        return 0.5 * self.k ** 2 + self.k * m + self.w(x) + 0.5 * m * m

    def fieldset(self) -> FieldSet:
        return landau_fieldset(self.m, self.dm, self.w, self.hbar)

    def integral_coeffs(self):
        """(alpha, beta, gamma) = (0, 0, 1) and the multiplier m(x)."""
        return (0.0, 0.0, 1.0), (lambda x, y: self.m(x) + 0 * np.asarray(y, float))

    def integral_value(self) -> float:
        return -self.k


@dataclass(frozen=True)
class PolarFirstOrder:
    m: Callable
    dm: Callable
    w: Callable
    M: int
    hbar: float = 1.0

    def __post_init__(self):
        if int(self.M) != self.M:
            raise ValueError("angular quantum number must be an integer")

    def u_potential(self, r):
        """Potential for psi = exp(-i M theta) u(r) with the 2D radial Laplacian."""
        r = np.asarray(r, dtype=float)
        return (self.hbar * self.M - self.m(r)) ** 2 / (2 * r * r) + self.w(r)

    def r_potential(self, r):
        """Potential for R = sqrt(r) u, where the radial Laplacian is d^2/dr^2."""
        r = np.asarray(r, dtype=float)
        hb, M, m = self.hbar, self.M, self.m(r)
        return self.w(r) + (0.5 * hb * hb * M * M + 0.5 * m * m - hb * m * M - hb * hb / 8) / (r * r)

    def fieldset(self) -> FieldSet:
        return polar_fieldset(self.m, self.dm, self.w, self.hbar)

    def integral_coeffs(self):
        """(1, 0, 0) with zero multiplier: in this gauge y A - x B + m = 0."""
        return (1.0, 0.0, 0.0), (lambda x, y: self.m(np.hypot(x, y)))

    def integral_value(self) -> float:
        return -self.hbar * self.M


def _richardson(coarse, fine, ratio=2.0, order=2):
    """Eliminate the h^order term given h_coarse / h_fine = ratio."""
    return fine + (fine - coarse) / (ratio ** order - 1)


def _check_converged(coarse, fine, tol):
    delta = np.abs(fine - coarse)
    scale = np.maximum(1.0, np.abs(fine))
    if np.any(delta > tol * scale):
        raise NotConverged(f"two-grid change {delta.max():.2e} exceeds {tol:.0e}")


def _dirichlet_levels(U, a, b, n, count, hbar, vectors=False):
    h = (b - a) / (n + 1)
    x = a + h * np.arange(1, n + 1)
    diag = hbar * hbar / (h * h) + U(x)
    off = np.full(n - 1, -0.5 * hbar * hbar / (h * h))
    if vectors:
        E, V = eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))
        return E, x, V / np.sqrt(h)
    return eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, count - 1))


def _confinement(U_ends, top, hbar, margin):
    need = top + margin * hbar
    if min(U_ends) < need:
        raise NotConfining(f"potential at the domain ends ({min(U_ends):.4g}) below {need:.4g}")


def cartesian_spectrum(cfo: CartesianFirstOrder, count: int, domain=(-8.0, 8.0),
                       grid_n: int = 2000, margin: float = 10.0,
                       tol: float = RICHARDSON_TOL) -> np.ndarray:
    """Lowest ``count`` levels of the x equation, Richardson-extrapolated.

    Second-order Dirichlet differences on grid_n and 2 grid_n + 1 interior
    nodes (the fine grid halves h exactly).
    """
    if count < 1:
        raise ValueError("count must be positive")
    a, b = map(float, domain)
    coarse = _dirichlet_levels(cfo.u_potential, a, b, grid_n, count, cfo.hbar)
    fine = _dirichlet_levels(cfo.u_potential, a, b, 2 * grid_n + 1, count, cfo.hbar)
    _confinement((float(cfo.u_potential(a)), float(cfo.u_potential(b))), fine[-1], cfo.hbar, margin)
    _check_converged(coarse, fine, tol)
    return _richardson(coarse, fine)


def cartesian_eigenfunctions(cfo: CartesianFirstOrder, count: int, domain=(-8.0, 8.0),
                             grid_n: int = 2000):
    """Finite-difference eigenpairs (E, x, f) on a single grid, f normalised in L2."""
    a, b = map(float, domain)
    return _dirichlet_levels(cfo.u_potential, a, b, grid_n, count, cfo.hbar, vectors=True)


def hermite_tau(omega: float, k: float, hbar: float = 1.0) -> float:
    if not k > 0:
        raise InvalidWavenumber("k must be positive")
    return sqrt(omega / hbar) * (2.0 * k) ** 0.25


def cartesian_exact_hermite(omega: float, k: float, n: int, hbar: float = 1.0, x=None):
    """Exact level for m = omega^2 x^2 with V = 0 (so W = -m^2/2).

    Returns E = k^2/2 + (2n+1) (hbar omega/2) sqrt(2k) and f = exp(-t^2 x^2/2) H_n(t x),
    as values on ``x`` when given, else as a callable.
    """
    tau = hermite_tau(omega, k, hbar)
    E = 0.5 * k * k + (2 * n + 1) * 0.5 * hbar * omega * sqrt(2.0 * k)

    def f(t):
        t = np.asarray(t, dtype=float)
        return np.exp(-0.5 * (tau * t) ** 2) * hermite(n, tau * t)

    return E, (f if x is None else f(x))


def hermite_system(omega: float, k: float, hbar: float = 1.0) -> CartesianFirstOrder:
    """m = omega^2 x^2, V = 0."""
    w2 = omega * omega
    return CartesianFirstOrder(m=lambda x: w2 * np.asarray(x, float) ** 2,
                               dm=lambda x: 2 * w2 * np.asarray(x, float),
                               w=lambda x: -0.5 * w2 * w2 * np.asarray(x, float) ** 4,
                               k=k, hbar=hbar)


def cartesian_ode_residual(cfo: CartesianFirstOrder, f: Callable, E: float, x, h: float = 1e-3):
    """|-hbar^2/2 f'' + (U - E) f| at x; f'' by a 6th-order difference."""
    x = np.asarray(x, dtype=float)
    c = (2 / 180, -27 / 180, 270 / 180, -490 / 180, 270 / 180, -27 / 180, 2 / 180)
    fxx = sum(w * f(x + (j - 3) * h) for j, w in enumerate(c)) / (h * h)
    return np.abs(-0.5 * cfo.hbar ** 2 * fxx + (cfo.u_potential(x) - E) * f(x))


def _radial_levels(pfo, r_max, n, count, vectors=False):
    # cell-centred nodes r_i = (i + 1/2) h; the flux through r = 0 vanishes
    h = r_max / (n + 0.5)
    r = h * (np.arange(n) + 0.5)
    faces = h * np.arange(1, n)
    hb2 = pfo.hbar ** 2
    diag = hb2 / (h * h) + pfo.u_potential(r)
    off = -0.5 * hb2 / (h * h) * faces / np.sqrt(r[:-1] * r[1:])
    if vectors:
        E, V = eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))
        return E, r, V / np.sqrt(r[:, None] * h)
    return eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, count - 1))


def radial_spectrum(pfo: PolarFirstOrder, count: int, r_domain=(0.0, 10.0), grid_n: int = 2000,
                    margin: float = 10.0, tol: float = RICHARDSON_TOL) -> np.ndarray:
    """Lowest ``count`` levels in the angular sector M, Richardson-extrapolated.

    The unknown is u = R / sqrt(r), discretised in the self-adjoint form
    -(hbar^2 / 2r)(r u')' on a cell-centred grid, so the origin needs no
    artificial inner wall.  A positive r_domain[0] is not supported.
    """
    if count < 1:
        raise ValueError("count must be positive")
    r_min, r_max = map(float, r_domain)
    if r_min != 0.0:
        raise ValueError("the radial grid always starts at the origin")
    coarse = _radial_levels(pfo, r_max, grid_n, count)
    fine = _radial_levels(pfo, r_max, 2 * grid_n, count)
    _confinement((float(pfo.u_potential(r_max)),), fine[-1], pfo.hbar, margin)
    _check_converged(coarse, fine, tol)
    return _richardson(coarse, fine, ratio=(2 * grid_n + 0.5) / (grid_n + 0.5))


def radial_eigenfunctions(pfo: PolarFirstOrder, count: int, r_max: float = 10.0, grid_n: int = 2000):
    """Eigenpairs (E, r, u) on a single cell-centred grid, u normalised with weight r."""
    return _radial_levels(pfo, r_max, grid_n, count, vectors=True)
