"""Constant field with an anisotropic oscillator, solved by quasiseparation.

W = (w1^2 x^2 + w2^2 y^2)/2 and Omega = Omega0, in the gauge
A = w2 Omega0/(w1+w2) y, B = -w1 Omega0/(w1+w2) x.  Products of Hermite
functions separate the combination H + phi X; fixing n = n1 + n2 and
superposing the n + 1 products reduces H to a tridiagonal block M.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .fields import FieldSet, harmonic_fieldset
from .profiles import CubicParams, Profile, elementary_profile


class DegenerateFrequencies(ValueError):
    """omega1 == omega2: the quasiseparating combination does not exist."""


class RankDeficiency(ValueError):
    """Null space of M(E) is not one-dimensional."""


class ComplexSpectrum(ArithmeticError):
    """Eigenvalues of M acquired imaginary parts beyond rounding."""


@dataclass(frozen=True)
class HarmonicSetup:
    omega1: float
    omega2: float
    Omega0: float
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("omega1", "omega2", "hbar"):
            if not float(getattr(self, name)) > 0:
                raise ValueError(f"{name} must be positive")
        if not np.isfinite(self.Omega0):
            raise ValueError("Omega0 must be finite")
        if self.omega1 == self.omega2:
            raise DegenerateFrequencies("omega1 and omega2 must differ")

    @property
    def D(self) -> float:
        return self.omega1 + self.omega2

    @property
    def root(self) -> float:
        """sqrt((w1 + w2)^2 + Omega0^2)."""
        return sqrt(self.D ** 2 + self.Omega0 ** 2)

    @property
    def kappa(self) -> float:
        """root / (w1 + w2): the frequency scale of the separated oscillators."""
        return self.root / self.D

    @property
    def R(self) -> float:
        return self.hbar * self.root / (2.0 * self.D)

    @property
    def S(self) -> complex:
        return 1j * self.hbar * self.Omega0 * sqrt(self.omega1 * self.omega2) / self.D

    @property
    def tau1(self) -> float:
        return sqrt(self.omega1 * self.kappa / self.hbar)

    @property
    def tau2(self) -> float:
        return sqrt(self.omega2 * self.kappa / self.hbar)

    @property
    def phi(self) -> float:
        return (self.omega2 - self.omega1) / self.omega1

    def fieldset(self) -> FieldSet:
        return harmonic_fieldset(self.omega1, self.omega2, self.Omega0, self.hbar)

    def to_cubic(self) -> tuple[CubicParams, Profile, Profile]:
        """Quadratic-profile parameters (gamma, xi, mu) and f = gamma x^2/2, g = xi y^2/2.

        Requires Omega0 != 0 (otherwise f and g are not determined).
        """
        if self.Omega0 == 0:
            raise ValueError("profile form needs a nonzero field")
        w1s, w2s = self.omega1 ** 2, self.omega2 ** 2
        K = (w1s - w2s) / self.Omega0
        params = CubicParams(gamma=w1s / K, xi=-w2s / K, mu=K + (w1s + w2s) / K)
        fp = elementary_profile(params, "X", "Quadratic", (0.0,), 0.0)
        gp = elementary_profile(params, "Y", "Quadratic", (0.0,), 0.0)
        return params, fp, gp


@dataclass(frozen=True)
class HarmonicLevel:
    n: int
    index: int
    energy: float
    lam: float
    coefficients: np.ndarray

    @property
    def lambda_(self) -> float:
        return self.lam


def hermite_all(m: int, t):
    """Physicists' Hermite polynomials H_0..H_m at t by the three-term recursion."""
    t = np.asarray(t, dtype=float)
    out = [np.ones_like(t)]
    if m >= 1:
        out.append(2.0 * t)
    for j in range(1, m):
        out.append(2.0 * t * out[j] - 2.0 * j * out[j - 1])
    return out


def hermite(m: int, t):
    return hermite_all(m, t)[m]


def separated_solution(setup: HarmonicSetup, n1: int, n2: int):
    """Hermite product (v, w) with its separation constant k0, energy and lambda.

    A single product is not an eigenstate of H when Omega0 != 0, so E is fixed
    as the diagonal value R((2 n1 + 1) w1 + (2 n2 + 1) w2) of the block M; this
    is the expectation value of H and the exact level when Omega0 = 0.
    """
    if n1 < 0 or n2 < 0:
        raise ValueError("quantum numbers must be nonnegative")
    t1, t2 = setup.tau1, setup.tau2

    def v(x):
        x = np.asarray(x, dtype=float)
        return np.exp(-0.5 * (t1 * x) ** 2) * hermite(n1, t1 * x)

    def w(y):
        y = np.asarray(y, dtype=float)
        return np.exp(-0.5 * (t2 * y) ** 2) * hermite(n2, t2 * y)

    E = setup.R * ((2 * n1 + 1) * setup.omega1 + (2 * n2 + 1) * setup.omega2)
    lam = lambda_for(setup, n1 + n2, E)
    k0 = E - 0.5 * setup.hbar * setup.omega2 * setup.kappa * (2 * n2 + 1)
    return v, w, k0, E, lam


def combined_eigenvalue(setup: HarmonicSetup, n: int) -> float:
    """Eigenvalue E + phi lambda of the separating combination on level n."""
    return setup.hbar * setup.omega2 * setup.kappa * (n + 1)


def separated_residuals(setup: HarmonicSetup, n1: int, n2: int, x, y):
    """Pointwise residuals of the two separated equations on a product.

    Second derivatives are exact (Hermite identity v'' = (t^2 x^2 - t^2 (2 n + 1)) v),
    so the residual measures only the separation constants.
    """
    v, w, k0, E, lam = separated_solution(setup, n1, n2)
    w1, w2, hb, kap = setup.omega1, setup.omega2, setup.hbar, setup.kappa
    t1, t2 = setup.tau1, setup.tau2
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    vv, ww = v(x), w(y)
    vxx = _hermite_function_dd(n1, t1, x, vv)
    wyy = _hermite_function_dd(n2, t2, y, ww)
    rx = (-0.5 * hb * hb * (w2 / w1) * vxx + 0.5 * w1 * w2 * kap ** 2 * x * x * vv
          + (w1 - w2) / w1 * lam * vv - k0 * vv)
    ry = -0.5 * hb * hb * wyy + 0.5 * w2 ** 2 * kap ** 2 * y * y * ww - E * ww + k0 * ww
    return rx, ry


def _hermite_function_dd(n, tau, x, values):
    # e^{-s^2/2} H_n(s) solves u'' = (s^2 - 2n - 1) u in s = tau x
    return tau * tau * ((tau * x) ** 2 - (2 * n + 1)) * values


def combination_residual(setup: HarmonicSetup, n1: int, n2: int, x, y):
    """|[-hbar^2/2 (w2/w1 d_xx + d_yy) + kappa^2/2 (w1 w2 x^2 + w2^2 y^2) - Lambda] v w|."""
    v, w, _, _, _ = separated_solution(setup, n1, n2)
    w1, w2, hb, kap = setup.omega1, setup.omega2, setup.hbar, setup.kappa
    X, Y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    vv, ww = v(X), w(Y)
    vxx = _hermite_function_dd(n1, setup.tau1, X, vv)
    wyy = _hermite_function_dd(n2, setup.tau2, Y, ww)
    lhs = (-0.5 * hb * hb * ((w2 / w1) * vxx * ww + vv * wyy)
           + 0.5 * kap ** 2 * (w1 * w2 * X * X + w2 ** 2 * Y * Y) * vv * ww)
    return np.abs(lhs - combined_eigenvalue(setup, n1 + n2) * vv * ww)


def build_M(setup: HarmonicSetup, n: int, E: float = 0.0) -> np.ndarray:
    """Block matrix M(E) acting on (A_{0,n}, A_{1,n-1}, ..., A_{n,0}).

    Row i (i = n1): diagonal R((2i+1) w1 + (2(n-i)+1) w2) - E, superdiagonal
    -(i+1) S, subdiagonal (n-i+1) S.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    diag, upper, lower = _bands(setup, n)
    M = np.diag(diag.astype(complex) - E)
    if n:
        M += np.diag(upper, 1) + np.diag(lower, -1)
    return M


def _bands(setup, n):
    i = np.arange(n + 1)
    diag = setup.R * ((2 * i + 1) * setup.omega1 + (2 * (n - i) + 1) * setup.omega2)
    j = np.arange(n)
    upper = -(j + 1) * setup.S
    lower = (n - j) * setup.S
    return diag, upper, lower


def spectrum(setup: HarmonicSetup, n: int) -> np.ndarray:
    """Sorted roots of det M(E) = 0.

    The product of opposite off-diagonals is (i+1)(n-i)|S|^2 >= 0, so M is
    similar to a real symmetric tridiagonal matrix; its eigenvalues are
    cross-checked against a general complex solve.
    """
    diag, upper, lower = _bands(setup, n)
    if n == 0:
        return diag.copy()
    off = np.sqrt(np.real(upper * lower))
    energies = eigh_tridiagonal(diag, off, eigvals_only=True)
    general = np.linalg.eigvals(build_M(setup, n))
    scale = max(1.0, float(np.max(np.abs(general))))
    if np.max(np.abs(general.imag)) > 1e-10 * scale:
        raise ComplexSpectrum("eigenvalues of M are not real")
    if np.max(np.abs(np.sort(general.real) - energies)) > 1e-9 * scale:
        raise ComplexSpectrum("tridiagonal and general eigenvalues disagree")
    return energies


def lambda_for(setup: HarmonicSetup, n: int, E: float) -> float:
    """lambda = [hbar w1 w2 kappa (n+1) - E w1] / (w2 - w1)."""
    w1, w2 = setup.omega1, setup.omega2
    if w1 == w2:
        raise DegenerateFrequencies("omega1 and omega2 must differ")
    return (setup.hbar * w1 * w2 * setup.kappa * (n + 1) - E * w1) / (w2 - w1)


def eigen_coefficients(setup: HarmonicSetup, n: int, E: float, tol: float = 1e-8) -> np.ndarray:
    """Unit null vector of M(E), first nonzero entry real positive."""
    M = build_M(setup, n, E)
    _, s, vh = np.linalg.svd(M)
    scale = max(1.0, abs(E), float(s[0]))
    if s[-1] > tol * scale:
        raise RankDeficiency(f"M(E) is not singular (smallest singular value {s[-1]:.3e})")
    if n and s[-2] <= tol * scale:
        raise RankDeficiency("null space of M(E) has dimension > 1")
    vec = vh[-1].conj()
    lead = vec[np.flatnonzero(np.abs(vec) > 1e-12)[0]]
    vec = vec * (abs(lead) / lead)
    return vec / np.linalg.norm(vec)


def levels(setup: HarmonicSetup, nmax: int) -> list[HarmonicLevel]:
    out = []
    for n in range(nmax + 1):
        for idx, E in enumerate(spectrum(setup, n)):
            out.append(HarmonicLevel(n, idx, float(E), lambda_for(setup, n, E),
                                     eigen_coefficients(setup, n, E)))
    return out


def wavefunction(setup: HarmonicSetup, level: HarmonicLevel, x, y):
    """Superposition of the n + 1 Hermite products with the level's coefficients."""
    n = level.n
    X, Y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    t1, t2 = setup.tau1, setup.tau2
    hx = hermite_all(n, t1 * X)
    hy = hermite_all(n, t2 * Y)
    total = np.zeros(X.shape, dtype=complex)
    for i, a in enumerate(level.coefficients):
        total += a * hx[i] * hy[n - i]
    return np.exp(-0.5 * ((t1 * X) ** 2 + (t2 * Y) ** 2)) * total


def first_excited_ratio(setup: HarmonicSetup, branch: int) -> complex:
    """A_{1,0}/A_{0,1} on the n = 1 level E = hbar(root +/- sqrt(d^2 + Omega0^2)/2).

    From the first row of M: -i [root (w2 - w1) -/+ D sqrt(d^2 + Omega0^2)]
    / (2 Omega0 sqrt(w1 w2)), with d = w1 - w2; independent of hbar.
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    w1, w2, Om = setup.omega1, setup.omega2, setup.Omega0
    split = sqrt((w1 - w2) ** 2 + Om ** 2)
    return -1j * (setup.root * (w2 - w1) - branch * setup.D * split) / (2.0 * Om * sqrt(w1 * w2))


def first_excited_energies(setup: HarmonicSetup):
    """Closed-form n = 1 pair (E_-, E_+)."""
    split = sqrt((setup.omega1 - setup.omega2) ** 2 + setup.Omega0 ** 2)
    return (0.5 * setup.hbar * (2 * setup.root - split), 0.5 * setup.hbar * (2 * setup.root + split))


def ground_state(setup: HarmonicSetup):
    """Closed-form n = 0 values (E, lambda)."""
    return 0.5 * setup.hbar * setup.root, setup.hbar * setup.omega1 * setup.root / (2.0 * setup.D)
