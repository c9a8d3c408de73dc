"""Discrete action of H and of the integrals X on sampled wavefunctions.

Derivatives use central differences (4th order unless the grid function
asks for another) with zero values assumed beyond the grid, so inputs must decay at the boundary.  Residual norms are
taken over the interior, ``MARGIN`` nodes away from each edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fields import FieldSet, IntegralData, build_fields
from .profiles import CubicParams, Profile

MARGIN = 5
BOUNDARY_TOL = 1e-8


class BoundaryContamination(ValueError):
    """Wavefunction not decayed at the grid boundary."""


@dataclass(frozen=True)
class GridFunction:
    """Complex samples on the tensor grid x (axis 0) by y (axis 1).

    ``order`` selects the central-difference accuracy used by every operator
    applied to this function.
    """

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    order: int = 4

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if x.size < 16 or y.size < 16:
            raise ValueError("grids need at least 16 nodes per axis")
        if v.shape != (x.size, y.size):
            raise ValueError("values must have shape (len(x), len(y))")
        if np.any(np.diff(x) <= 0) or np.any(np.diff(y) <= 0):
            raise ValueError("grid coordinates must increase")
        _weights(_D1, self.order)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "values", v)

    @property
    def hx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def hy(self) -> float:
        return float(self.y[1] - self.y[0])

    @property
    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing="ij")

    @classmethod
    def from_function(cls, fn: Callable, x, y, order: int = 4) -> "GridFunction":
        X, Y = np.meshgrid(np.asarray(x, float), np.asarray(y, float), indexing="ij")
        return cls(x, y, fn(X, Y), order)

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.x, self.y, values, self.order)

    def with_order(self, order: int) -> "GridFunction":
        return GridFunction(self.x, self.y, self.values, order)

    def __add__(self, other):
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        return self.with_values(self.values - other.values)

    def __mul__(self, c):
        return self.with_values(self.values * c)

    __rmul__ = __mul__

    def norm(self, margin: int = MARGIN) -> float:
        v = interior(self.values, margin)
        return float(np.sqrt(np.sum(np.abs(v) ** 2) * self.hx * self.hy))

    def normalized(self) -> "GridFunction":
        return self * (1.0 / self.norm(0))


def square_grid(n: int, half_width: float, center=(0.0, 0.0)):
    """Node coordinates of an n by n grid on a square of the given half width."""
    x = np.linspace(center[0] - half_width, center[0] + half_width, n)
    y = np.linspace(center[1] - half_width, center[1] + half_width, n)
    return x, y


def interior(values: np.ndarray, margin: int = MARGIN) -> np.ndarray:
    if margin == 0:
        return values
    return values[margin:-margin, margin:-margin]


def check_boundary(psi: GridFunction, tol: float = BOUNDARY_TOL):
    v = np.abs(psi.values)
    peak = v.max()
    if peak == 0.0:
        return
    edge = max(v[:2].max(), v[-2:].max(), v[:, :2].max(), v[:, -2:].max())
    if edge > tol * peak:
        raise BoundaryContamination(f"boundary amplitude {edge / peak:.2e} of peak exceeds {tol:.0e}")


# Central-difference weights for orders 2, 4, 6, 8 (offsets -r..r)
_D1 = {
    2: (-1 / 2, 0.0, 1 / 2),
    4: (1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12),
    6: (-1 / 60, 3 / 20, -3 / 4, 0.0, 3 / 4, -3 / 20, 1 / 60),
    8: (1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280),
}
_D2 = {
    2: (1.0, -2.0, 1.0),
    4: (-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12),
    6: (1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90),
    8: (-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560),
}


def _stencil(values, weights, axis):
    r = len(weights) // 2
    width = [(0, 0)] * values.ndim
    width[axis] = (r, r)
    p = np.pad(values, width)
    n = values.shape[axis]
    out = np.zeros_like(values)
    for j, w in enumerate(weights):
        if w:
            out = out + w * np.take(p, np.arange(j, j + n), axis=axis)
    return out


def d1(values: np.ndarray, h: float, axis: int, order: int = 4) -> np.ndarray:
    """Central first derivative with zero extension beyond the grid."""
    return _stencil(values, _weights(_D1, order), axis) / h


def d2(values: np.ndarray, h: float, axis: int, order: int = 4) -> np.ndarray:
    """Central second derivative with zero extension beyond the grid."""
    return _stencil(values, _weights(_D2, order), axis) / (h * h)


def _weights(table, order):
    if order not in table:
        raise ValueError(f"stencil order must be one of {sorted(table)}, got {order}")
    return table[order]


def _field_on(psi: GridFunction, fn: Callable) -> np.ndarray:
    X, Y = psi.mesh
    return np.broadcast_to(np.asarray(fn(X, Y), dtype=float), X.shape)


def _derivative_fields(fs: FieldSet, psi: GridFunction, A, B):
    if fs.a_x is not None:
        ax = _field_on(psi, fs.a_x)
    else:
        ax = np.gradient(A, psi.hx, axis=0, edge_order=2) if A.ndim else 0.0
    if fs.b_y is not None:
        by = _field_on(psi, fs.b_y)
    else:
        by = np.gradient(B, psi.hy, axis=1, edge_order=2)
    return ax, by


def apply_H(fs: FieldSet, psi: GridFunction, boundary_tol: float | None = BOUNDARY_TOL) -> GridFunction:
    """-hbar^2/2 Lap psi - i hbar (A psi_x + B psi_y) - i hbar/2 (A_x + B_y) psi + V psi."""
    if boundary_tol is not None:
        check_boundary(psi, boundary_tol)
    hb = fs.hbar
    v = psi.values
    A = _field_on(psi, fs.a_pot)
    B = _field_on(psi, fs.b_pot)
    V = _field_on(psi, fs.v_pot)
    ax, by = _derivative_fields(fs, psi, A, B)
    o = psi.order
    lap = d2(v, psi.hx, 0, o) + d2(v, psi.hy, 1, o)
    out = (-0.5 * hb * hb * lap - 1j * hb * (A * d1(v, psi.hx, 0, o) + B * d1(v, psi.hy, 1, o))
           - 0.5j * hb * (ax + by) * v + V * v)
    return psi.with_values(out)


def apply_X_first_order(fs: FieldSet, m_data, coeffs, psi: GridFunction,
                        boundary_tol: float | None = BOUNDARY_TOL) -> GridFunction:
    """a (L3 + yA - xB) + b (P1 + A) + c (P2 + B) + m for coeffs (a, b, c).

    ``m_data`` is an IntegralData (its m_fn is used) or a callable m(x, y).
    """
    if boundary_tol is not None:
        check_boundary(psi, boundary_tol)
    a, b, c = coeffs[:3]
    hb = fs.hbar
    m_fn = m_data.m_fn if isinstance(m_data, IntegralData) else m_data
    X, Y = psi.mesh
    v = psi.values
    A = _field_on(psi, fs.a_pot)
    B = _field_on(psi, fs.b_pot)
    m = _field_on(psi, m_fn)
    dx = d1(v, psi.hx, 0, psi.order)
    dy = d1(v, psi.hy, 1, psi.order)
    l3 = -1j * hb * (Y * dx - X * dy) + (Y * A - X * B) * v
    p1 = -1j * hb * dx + A * v
    p2 = -1j * hb * dy + B * v
    return psi.with_values(a * l3 + b * p1 + c * p2 + m * v)


def apply_X_cartesian(params: CubicParams, fp: Profile, gp: Profile, fs: FieldSet,
                      psi: GridFunction, boundary_tol: float | None = BOUNDARY_TOL,
                      idata: IntegralData | None = None) -> GridFunction:
    """Second-order Cartesian integral with k1 = -g'(y), k2 = -f'(x).

    X = -hbar^2/2 d_xx - i hbar [(A + k1) d_x + k2 d_y] - i hbar/2 A_x
        + A^2/2 + m + k1 A + k2 B
    """
    if boundary_tol is not None:
        check_boundary(psi, boundary_tol)
    if idata is None:
        idata = build_fields(params, fp, gp)[2]
    hb = fs.hbar
    v = psi.values
    A = _field_on(psi, fs.a_pot)
    B = _field_on(psi, fs.b_pot)
    ax, _ = _derivative_fields(fs, psi, A, B)
    k1 = _field_on(psi, idata.k1_fn)
    k2 = _field_on(psi, idata.k2_fn)
    m = _field_on(psi, idata.m_fn)
    # k1 depends on y only and k2 on x only, so their cross derivatives vanish
    o = psi.order
    out = (-0.5 * hb * hb * d2(v, psi.hx, 0, o)
           - 1j * hb * ((A + k1) * d1(v, psi.hx, 0, o) + k2 * d1(v, psi.hy, 1, o))
           - 0.5j * hb * ax * v + (0.5 * A * A + m + k1 * A + k2 * B) * v)
    return psi.with_values(out)


def commutator_residual(fs: FieldSet, x_applier: Callable, test_functions,
                        margin: int = MARGIN) -> float:
    """Max over tests of ||[X, H] psi|| / (||psi|| (||H psi|| + ||X psi||)).

    The ratio scales as 1/amplitude, so it is applied to the test functions
    exactly as given (``gaussian_tests`` yields unit-peak Gaussians).
    """
    worst = 0.0
    for psi in test_functions:
        h_psi = apply_H(fs, psi)
        x_psi = x_applier(psi)
        xh = _apply_unchecked(x_applier, h_psi)
        hx = apply_H(fs, x_psi, boundary_tol=None)
        comm = xh - hx
        scale = psi.norm(margin) * (h_psi.norm(margin) + x_psi.norm(margin))
        worst = max(worst, comm.norm(margin) / scale)
    return worst


def _apply_unchecked(x_applier, psi):
    try:
        return x_applier(psi, boundary_tol=None)
    except TypeError:
        return x_applier(psi)


def gaussian_tests(x, y, rng: np.random.Generator, count: int = 5,
                   width_range=(0.02, 0.028), momentum: float = 1.0, order: int = 4):
    """Random Gaussians centred in the inner 60% of the box, with plane-wave phases.

    Widths are fractions of the box side; the defaults keep the tails below
    1e-10 of the peak at the boundary.
    """
    lx, ly = x[-1] - x[0], y[-1] - y[0]
    cx0, cy0 = 0.5 * (x[0] + x[-1]), 0.5 * (y[0] + y[-1])
    X, Y = np.meshgrid(x, y, indexing="ij")
    out = []
    for _ in range(count):
        cx = cx0 + rng.uniform(-0.3, 0.3) * lx
        cy = cy0 + rng.uniform(-0.3, 0.3) * ly
        sx = rng.uniform(*width_range) * lx
        sy = rng.uniform(*width_range) * ly
        kx, ky = rng.uniform(-momentum, momentum, 2)
        vals = np.exp(-0.5 * ((X - cx) / sx) ** 2 - 0.5 * ((Y - cy) / sy) ** 2 + 1j * (kx * X + ky * Y))
        out.append(GridFunction(x, y, vals, order))
    return out


def eigen_residual(applier: Callable, psi: GridFunction, value: float, margin: int = MARGIN) -> float:
    """||(Op - value) psi|| / ||psi|| on the interior."""
    res = applier(psi) - psi * value
    return res.norm(margin) / psi.norm(margin)


# ---------------------------------------------------------------------------
# Classical motion

@dataclass(frozen=True)
class ClassicalState:
    x: float
    y: float
    vx: float
    vy: float
    t: float = 0.0

    def __post_init__(self):
        if not all(np.isfinite([self.x, self.y, self.vx, self.vy, self.t])):
            raise ValueError("classical state must be finite")


def _grad(w_eff, x, y, h=1e-4):
    def dd(fn):
        return (-fn(2 * h) + 8 * fn(h) - 8 * fn(-h) + fn(-2 * h)) / (12 * h)
    return dd(lambda s: w_eff(x + s, y)), dd(lambda s: w_eff(x, y + s))


def classical_trajectory(omega_field: Callable, w_eff: Callable, s0: ClassicalState,
                         dt: float, T: float, w_grad: Callable | None = None):
    """RK4 path of x'' = Omega y' - W_x, y'' = -Omega x' - W_y.

    ``w_grad(x, y) -> (W_x, W_y)`` may be given; otherwise the gradient is
    taken by 4th-order differences with step 1e-4.
    """
    if dt <= 0 or T <= 0:
        raise ValueError("dt and T must be positive")
    grad = w_grad or (lambda x, y: _grad(w_eff, x, y))

    def rhs(s):
        x, y, vx, vy = s
        om = float(omega_field(x, y))
        wx, wy = grad(x, y)
        return np.array([vx, vy, om * vy - wx, -om * vx - wy])

    steps = int(round(T / dt))
    s = np.array([s0.x, s0.y, s0.vx, s0.vy], dtype=float)
    path = [s0]
    for j in range(1, steps + 1):
        k1 = rhs(s)
        k2 = rhs(s + 0.5 * dt * k1)
        k3 = rhs(s + 0.5 * dt * k2)
        k4 = rhs(s + dt * k3)
        s = s + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        path.append(ClassicalState(*s, t=s0.t + j * dt))
    return path


def energy(state: ClassicalState, w_eff: Callable) -> float:
    return 0.5 * (state.vx ** 2 + state.vy ** 2) + float(w_eff(state.x, state.y))


def energy_drift(path, w_eff: Callable) -> float:
    e0 = energy(path[0], w_eff)
    return max(abs(energy(s, w_eff) - e0) for s in path)


def cartesian_classical_integral(idata: IntegralData) -> Callable:
    """Classical X = vx^2/2 + k1 vx + k2 vy + m, with velocities as kinetic momenta."""
    def value(s: ClassicalState) -> float:
        return float(0.5 * s.vx ** 2 + idata.k1_fn(s.x, s.y) * s.vx
                     + idata.k2_fn(s.x, s.y) * s.vy + idata.m_fn(s.x, s.y))
    return value


def first_order_classical_integral(coeffs, m_fn: Callable) -> Callable:
    """Classical X = a (y vx - x vy) + b vx + c vy + m."""
    a, b, c = coeffs[:3]

    def value(s: ClassicalState) -> float:
        return float(a * (s.y * s.vx - s.x * s.vy) + b * s.vx + c * s.vy + m_fn(s.x, s.y))
    return value
