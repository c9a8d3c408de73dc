"""Brute-force finite-difference eigensolver for the magnetic Hamiltonian.

The operator is assembled in the symmetric form

    -hbar^2/2 (Dxx + Dyy) - (i hbar/2)(A Dx + Dx A + B Dy + Dy B) + V

with antisymmetric central first differences, so the matrix is Hermitian by
construction.  Dirichlet walls sit one step outside the interior nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .fields import FieldSet
from .operators import GridFunction

DENSE_LIMIT = 64 * 64
DENSE_AUTO = 32 * 32
MAX_COUNT = 30

_D1 = {2: (-1 / 2, 0.0, 1 / 2), 4: (1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12)}
_D2 = {2: (1.0, -2.0, 1.0), 4: (-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12)}


class NoConvergence(ArithmeticError):
    """Iterative eigensolver failed or returned inaccurate pairs."""


class NotHermitian(ArithmeticError):
    """Assembled operator failed the self-adjointness probe."""


def _band(n, weights, h):
    r = len(weights) // 2
    offsets = [j - r for j in range(len(weights))]
    diags = [np.full(n - abs(o), w / h) for o, w in zip(offsets, weights)]
    return sp.diags(diags, offsets, shape=(n, n), format="csr")


@dataclass
class DiscreteHamiltonian:
    """Sparse Hermitian matrix of H on the interior nodes x (axis 0) by y (axis 1)."""

    x: np.ndarray
    y: np.ndarray
    matrix: sp.csr_matrix
    hbar: float
    order: int
    w_min: float = 0.0
    hermitian: bool = field(default=False)

    @classmethod
    def build(cls, fs: FieldSet, n: int, half_width: float, center=(0.0, 0.0),
              order: int = 4, ny: int | None = None, half_width_y: float | None = None,
              check: bool = True, rng: np.random.Generator | None = None) -> "DiscreteHamiltonian":
        if order not in _D1:
            raise ValueError("oracle stencil order must be 2 or 4")
        ny = n if ny is None else ny
        hy_half = half_width if half_width_y is None else half_width_y
        if n < 16 or ny < 16:
            raise ValueError("grids need at least 16 nodes per axis")
        x = np.linspace(center[0] - half_width, center[0] + half_width, n + 2)[1:-1]
        y = np.linspace(center[1] - hy_half, center[1] + hy_half, ny + 2)[1:-1]
        hx, hy = x[1] - x[0], y[1] - y[0]
        X, Y = np.meshgrid(x, y, indexing="ij")
        A = np.broadcast_to(fs.a_pot(X, Y), X.shape).ravel()
        B = np.broadcast_to(fs.b_pot(X, Y), X.shape).ravel()
        V = np.broadcast_to(fs.v_pot(X, Y), X.shape).ravel()
        Ix, Iy = sp.identity(n, format="csr"), sp.identity(ny, format="csr")
        Dx = sp.kron(_band(n, _D1[order], hx), Iy, format="csr")
        Dy = sp.kron(Ix, _band(ny, _D1[order], hy), format="csr")
        Dxx = sp.kron(_band(n, _D2[order], hx * hx), Iy, format="csr")
        Dyy = sp.kron(Ix, _band(ny, _D2[order], hy * hy), format="csr")
        dA, dB = sp.diags(A), sp.diags(B)
        hb = fs.hbar
        H = (-0.5 * hb * hb * (Dxx + Dyy) - 0.5j * hb * (dA @ Dx + Dx @ dA + dB @ Dy + Dy @ dB)
             + sp.diags(V)).tocsr()
        w_min = float(np.min(np.broadcast_to(fs.w_eff(X, Y), X.shape)))
        dh = cls(x, y, H, hb, order, w_min)
        if check:
            dh.hermitian = hermiticity_defect(dh, rng) < 1e-10
            if not dh.hermitian:
                raise NotHermitian("assembled operator is not self-adjoint")
        return dh

    @property
    def shape(self):
        return (self.x.size, self.y.size)

    @property
    def cell(self) -> float:
        return float((self.x[1] - self.x[0]) * (self.y[1] - self.y[0]))

    def apply(self, psi: GridFunction) -> GridFunction:
        return psi.with_values((self.matrix @ psi.values.ravel()).reshape(self.shape))

    def grid_function(self, values) -> GridFunction:
        return GridFunction(self.x, self.y, np.asarray(values).reshape(self.shape))

    def sample(self, fn) -> GridFunction:
        return GridFunction.from_function(fn, self.x, self.y)


def hermiticity_defect(dh: DiscreteHamiltonian, rng: np.random.Generator | None = None,
                       pairs: int = 3) -> float:
    """Max relative |<p, H q> - conj(<q, H p>)| over random complex pairs."""
    rng = rng or np.random.default_rng(0)
    N = dh.matrix.shape[0]
    worst = 0.0
    for _ in range(pairs):
        p = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        q = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        a = np.vdot(p, dh.matrix @ q)
        b = np.conj(np.vdot(q, dh.matrix @ p))
        worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
    return worst


def lowest_eigenpairs(dh: DiscreteHamiltonian, count: int, tol: float = 1e-8,
                      shift: float | None = None, dense: bool | None = None):
    """Lowest ``count`` eigenpairs as (E, GridFunction normalised in L2).

    Uses shift-invert Lanczos (ARPACK) about a shift below min W, a lower
    bound of the spectrum since (p + A)^2 >= 0, or a dense solve for grids up
    to 64 x 64 (chosen automatically up to 32 x 32).  Residuals ||H psi - E psi|| / ||psi|| above ``tol``
    (relative to max(1, |E|)) raise NoConvergence.
    """
    if not 1 <= count <= MAX_COUNT:
        raise ValueError(f"count must lie in 1..{MAX_COUNT}")
    H = dh.matrix
    N = H.shape[0]
    if dense is None:
        dense = N <= DENSE_AUTO
    if dense:
        if N > DENSE_LIMIT:
            raise ValueError("dense path limited to 64 x 64 grids")
        E, V = np.linalg.eigh(H.toarray())
        E, V = E[:count], V[:, :count]
    else:
        if shift is None:
            shift = dh.w_min - 1.0
        try:
            E, V = eigsh(H, k=count, sigma=shift, which="LM", tol=1e-12)
        except ArpackNoConvergence as exc:
            raise NoConvergence(str(exc)) from exc
        order = np.argsort(E)
        E, V = E[order], V[:, order]
    out = []
    for j in range(count):
        v = V[:, j]
        res = np.linalg.norm(H @ v - E[j] * v) / np.linalg.norm(v)
        if res > tol * max(1.0, abs(E[j])):
            raise NoConvergence(f"eigenpair {j} residual {res:.2e}")
        psi = dh.grid_function(v / np.sqrt(np.vdot(v, v).real * dh.cell))
        out.append((float(E[j]), psi))
    return out


def lowest_eigenvalues(dh: DiscreteHamiltonian, count: int, **kwargs) -> np.ndarray:
    return np.array([e for e, _ in lowest_eigenpairs(dh, count, **kwargs)])


def eigenvalue_of(dh: DiscreteHamiltonian, psi: GridFunction):
    """Rayleigh quotient <psi, H psi>/<psi, psi> and ||H psi - q psi|| / ||psi||."""
    v = psi.values.ravel()
    if not np.any(v):
        raise ValueError("psi must be nonzero")
    hv = dh.matrix @ v
    q = float(np.vdot(v, hv).real / np.vdot(v, v).real)
    return q, float(np.linalg.norm(hv - q * v) / np.linalg.norm(v))


@dataclass(frozen=True)
class SpectrumComparison:
    pairs: tuple
    max_abs_deviation: float
    max_rel_deviation: float
    unmatched_exact: tuple
    unmatched_numeric: tuple
    tol: float
    relative: bool

    @property
    def ok(self) -> bool:
        return not self.unmatched_exact

    def rows(self):
        """(exact, numeric, abs deviation, rel deviation) per matched pair."""
        return [(e, m, abs(m - e), abs(m - e) / max(abs(e), 1e-300)) for e, m in self.pairs]


def compare_spectra(exact, numeric, tol: float, relative: bool = True) -> SpectrumComparison:
    """Greedy matching: each exact level, ascending, takes the nearest free numeric level.

    A pair counts as matched when its deviation is within ``tol`` (relative to
    |exact| when ``relative``).
    """
    exact = sorted(float(e) for e in exact)
    free = sorted(float(e) for e in numeric)
    pairs, missing = [], []
    for e in exact:
        if not free:
            missing.append(e)
            continue
        j = int(np.argmin([abs(m - e) for m in free]))
        dev = abs(free[j] - e)
        limit = tol * (abs(e) if relative else 1.0)
        if dev <= limit:
            pairs.append((e, free.pop(j)))
        else:
            missing.append(e)
    abs_dev = max((abs(m - e) for e, m in pairs), default=0.0)
    rel_dev = max((abs(m - e) / max(abs(e), 1e-300) for e, m in pairs), default=0.0)
    return SpectrumComparison(tuple(pairs), abs_dev, rel_dev, tuple(missing), tuple(free), tol, relative)


def default_half_width(tau_min: float, lengths: float = 8.0) -> float:
    """Box half width of ``lengths`` characteristic lengths 1/tau_min."""
    return lengths / tau_min


def extrapolated_eigenvalues(fs: FieldSet, n: int, half_width: float, count: int,
                             order: int = 4, **kwargs) -> np.ndarray:
    """Two-grid Richardson estimate from n and 2n + 1 interior nodes (h halves exactly)."""
    coarse = lowest_eigenvalues(DiscreteHamiltonian.build(fs, n, half_width, order=order), count, **kwargs)
    fine = lowest_eigenvalues(DiscreteHamiltonian.build(fs, 2 * n + 1, half_width, order=order), count, **kwargs)
    return fine + (fine - coarse) / (2.0 ** order - 1.0)
