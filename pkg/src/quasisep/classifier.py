"""Quasiseparation classifier.

Decides which family a pair of profiles (f, g) belongs to, supplies the
separation constants (k, c1, c2, eps1, eps2) and evaluates the diagnostics
N1, N2 and the mixed derivative of the coupling term T(x, y).

Throughout, radicands are ``rf = c1 - 2 k f(x)`` and ``rg = c2 + 2 k g(y)``
and the multiplier of X in the combined equation is ``phi = P(x) Q(y) - 1``
with ``P = eps1 sqrt(rf)/|f'|`` and ``Q = eps2 |g'|/sqrt(rg)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import sqrt

import numpy as np
from scipy.optimize import brentq

from .profiles import CATALOGUE, CubicParams, Profile

CASE_TAGS = ("Case1_LinearG", "Case2_ExpG", "Case3_Quadratic", "Case4_Tables", "NotQuasiseparable")
PHI_KINDS = ("ConstantMinusOne", "ConstantRatio", "SeparableRatio")

F_ROWS = {"InversePowerA": "F1", "TrigB": "F2", "TanhC": "F3", "CotanhD": "F4"}
G_ROWS = {"InversePowerA": "G1", "CotanhD": "G2", "TanhC": "G3", "TrigB": "G4"}
# sign s such that N2 = s * eps * (k/2) sqrt(-k alpha/3); eps is eps2 for F rows, eps1 for G rows
F_N2_SIGN = {"F1": 1.0, "F2": 1.0, "F3": -1.0, "F4": 1.0}
G_N2_SIGN = {"G1": -1.0, "G2": -1.0, "G3": 1.0, "G4": -1.0}
SAME_EPS_PAIRS = frozenset({("F1", "G3"), ("F2", "G3"), ("F3", "G1"),
                            ("F3", "G2"), ("F3", "G4"), ("F4", "G3")})

CONSTANCY_RTOL = 1e-9
MIN_SAMPLES = 16


class DomainViolation(ValueError):
    """Radicands not simultaneously positive at a requested point."""


class EmptyDomain(ValueError):
    """No interval on which the radicand is positive."""


class DerivativeZero(ValueError):
    """phi requested where the profile derivative vanishes."""


class NotQuasiseparable(ValueError):
    """Inputs do not satisfy the constraints of any separable case."""


@dataclass(frozen=True)
class SeparationConstants:
    k: float
    c1: float
    c2: float
    eps1: float = 1.0
    eps2: float = 1.0
    n1_const: float = 0.0
    n2_const: float = 0.0

    def __post_init__(self):
        for name in ("eps1", "eps2"):
            if getattr(self, name) not in (1.0, -1.0):
                raise ValueError(f"{name} must be +1 or -1")
        if self.k != 0.0:
            expect = 8.0 * self.eps2 * self.n2_const / (self.k * self.eps1)
            if abs(self.n1_const - expect) > 1e-9 * max(1.0, abs(expect)):
                raise ValueError("N1 must equal 8 eps2 N2 / (k eps1)")

    def normalized(self) -> "SeparationConstants":
        """Flip (k, c1, c2) if needed so radicands are taken positive.

        Both square roots imaginary is the same quasiseparation as both real
        after the sign flip, so callers always see positive radicands.
        """
        return SeparationConstants(-self.k, -self.c1, -self.c2, self.eps1, self.eps2,
                                   self.n1_const, -self.n2_const)


@dataclass(frozen=True)
class TheoremCase:
    tag: str
    table_row_f: str | None = None
    table_row_g: str | None = None
    phi_kind: str | None = None
    note: str = ""

    @property
    def separable(self) -> bool:
        return self.tag != "NotQuasiseparable"

    def eps_relation(self) -> float:
        """eps2/eps1 forced by the table pairing (Case 4 only)."""
        if self.tag != "Case4_Tables":
            raise ValueError("only Case 4 pairs fix an eps relation")
        return 1.0 if (self.table_row_f, self.table_row_g) in SAME_EPS_PAIRS else -1.0


@dataclass
class SeparationDiagnostics:
    """Sampled auxiliary functions of the separability analysis."""

    x: np.ndarray
    y: np.ndarray
    phi: dict = field(default_factory=dict)      # phi1..phi4 on the (x, y) mesh
    v1: np.ndarray | None = None
    w1: np.ndarray | None = None
    f_terms: dict = field(default_factory=dict)  # F1, F2 on x
    g_terms: dict = field(default_factory=dict)  # G1, G2 on y
    t_xy: np.ndarray | None = None

    @property
    def max_mixed(self) -> float:
        return float(np.max(np.abs(self.t_xy))) if self.t_xy is not None else float("nan")


# ---------------------------------------------------------------------------
# Classification

def _exactly_single_exponential(p: Profile) -> bool:
    return p.case_tag == "Exponential" and (p.coefficients[0] == 0.0) != (p.coefficients[1] == 0.0)


def check_phi_minus_one(gp: Profile) -> bool:
    """True iff g''^2 - g' g''' vanishes identically for this profile."""
    if gp.case_tag == "Linear":
        return True
    return _exactly_single_exponential(gp)


def classify(params: CubicParams, fp: Profile, gp: Profile) -> TheoremCase:
    """Identify the separable family of (params, f, g), if any."""
    if fp.axis != "X" or gp.axis != "Y":
        raise ValueError("classify expects an X-axis f and a Y-axis g")
    if fp.ode != params.ode("X") or gp.ode != params.ode("Y"):
        raise ValueError("profiles were built for different parameters")
    if fp.case_tag == "Linear" and gp.case_tag == "Linear":
        raise ValueError("f'' and g'' both vanish identically; no magnetic field")
    a = params.alpha
    if a == 0.0:
        if params.delta == 0.0 and params.xi == 0.0 and gp.case_tag == "Linear":
            return TheoremCase("Case1_LinearG", phi_kind="ConstantMinusOne")
        if params.delta > 0.0 and gp.case_tag == "Exponential":
            g1, g2 = gp.coefficients
            if _exactly_single_exponential(gp):
                return TheoremCase("Case2_ExpG", phi_kind="ConstantMinusOne")
            small = min(abs(g1), abs(g2))
            if small != 0.0 and small <= 1e-12 * max(abs(g1), abs(g2)):
                warnings.warn("exponential g has a near-zero coefficient; g1 g2 = 0 is required exactly",
                              stacklevel=2)
            return TheoremCase("NotQuasiseparable", note="g1 g2 != 0")
        if (params.beta == 0.0 and params.delta == 0.0 and params.gamma * params.xi < 0.0
                and fp.case_tag == "Quadratic" and gp.case_tag == "Quadratic"):
            return TheoremCase("Case3_Quadratic", phi_kind="ConstantRatio")
        return TheoremCase("NotQuasiseparable", note="alpha = 0 outside the separable families")
    rf, rg = F_ROWS.get(fp.case_tag), G_ROWS.get(gp.case_tag)
    if rf is None or rg is None:
        which = fp if rf is None else gp
        return TheoremCase("NotQuasiseparable", note=f"{which.axis} profile {which.case_tag} has no table row")
    return TheoremCase("Case4_Tables", rf, rg, "SeparableRatio")


def _anchor_root(p: Profile) -> float:
    """The simple (or triple) root used as the radicand anchor in the tables."""
    r = p.roots
    if p.case_tag == "InversePowerA":
        return r[0]
    if p.case_tag == "TrigB":
        return r[0] if p.mirror < 0 else r[2]
    if p.case_tag in ("TanhC", "CotanhD"):
        return r[0] if p.mirror > 0 else r[2]
    raise ValueError(f"{p.case_tag} has no table anchor")


def table_n2(row: str, eps: float, k: float, alpha: float) -> float:
    sign = F_N2_SIGN[row] if row.startswith("F") else G_N2_SIGN[row]
    return sign * eps * 0.5 * k * sqrt(-k * alpha / 3.0)


def separation_constants(case: TheoremCase, params: CubicParams, fp: Profile, gp: Profile,
                         k: float | None = None, eps1: float = 1.0,
                         eps2: float | None = None) -> SeparationConstants | None:
    """Constants (k, c1, c2, eps1, eps2, N1, N2) for a separable case.

    Returns None for the phi = -1 cases, which carry no such constants.
    """
    if case.tag in ("Case1_LinearG", "Case2_ExpG"):
        return None
    if case.tag == "Case3_Quadratic":
        k = -np.sign(params.gamma) if k is None else float(k)
        if k == 0.0:
            raise NotQuasiseparable("case 3 needs k != 0")
        if k * params.gamma > 0:
            raise NotQuasiseparable("case 3 needs k gamma < 0 for positive radicands")
        c1 = 2.0 * k * fp.coefficients[0]
        c2 = -2.0 * k * gp.coefficients[0]
        return SeparationConstants(float(k), c1, c2, eps1, eps1 if eps2 is None else eps2)
    if case.tag != "Case4_Tables":
        raise NotQuasiseparable(case.note or "configuration is not quasiseparable")
    a = params.alpha
    k = -np.sign(a) if k is None else float(k)
    if k == 0.0 or k * a >= 0.0:
        raise NotQuasiseparable("case 4 needs k != 0 with k alpha < 0")
    if eps2 is None:
        eps2 = case.eps_relation() * eps1
    c1 = 2.0 * k * _anchor_root(fp)
    c2 = -2.0 * k * _anchor_root(gp)
    n2 = table_n2(case.table_row_f, eps2, k, a)
    n1 = 8.0 * eps2 * n2 / (k * eps1)
    return SeparationConstants(float(k), c1, c2, float(eps1), float(eps2), n1, n2)


def k_zero_constants(c1: float, c2: float, eps1: float = 1.0, eps2: float = 1.0) -> SeparationConstants:
    """Constants of the k = 0 branch (both c1, c2 must be nonzero)."""
    if c1 == 0.0 or c2 == 0.0:
        raise NotQuasiseparable("k = 0 with c1 c2 = 0 reduces to phi = -1 or is inconsistent")
    return SeparationConstants(0.0, c1, c2, eps1, eps2)


# ---------------------------------------------------------------------------
# Radicands and the factors of 1 + phi

def _real_roots(p: Profile):
    if p.case_tag in CATALOGUE:
        return () if p.case_tag == "EllipticCnG" else p.roots
    a, b, c = p.ode
    sig = p.sigma
    if p.case_tag == "Linear":
        return ()
    if b == 0.0:
        return (-sig / (2.0 * c),)
    disc = c * c - b * sig
    if disc < -1e-14 * max(1.0, c * c):
        return ()
    dd = sqrt(max(disc, 0.0))
    return tuple(sorted(((-c - dd) / b, (-c + dd) / b)))


def _match_root(p: Profile, value: float):
    for r in _real_roots(p):
        if abs(r - value) <= 1e-10 * max(1.0, abs(r)):
            return r
    return None


def _deflated(p: Profile, t, anchor: float):
    """D(v) = P3(v)/(v - anchor) and dD/dv at t, with factors formed by shifts."""
    a, b, c = p.ode
    if p.case_tag in CATALOGUE:
        others = list(p.roots)
        others.remove(min(others, key=lambda r: abs(r - anchor)))
        u1 = p.derivatives(t, 0, shift=others[0])[0]
        u2 = p.derivatives(t, 0, shift=others[1])[0]
        lead = 2.0 * a / 3.0
        return lead * u1 * u2, lead * (u1 + u2)
    if b == 0.0:
        return np.full(np.shape(t), 2.0 * c), np.zeros(np.shape(t))
    roots = list(_real_roots(p))
    roots.remove(min(roots, key=lambda r: abs(r - anchor)))
    u = p.derivatives(t, 0, shift=roots[0])[0]
    return b * u, np.full(np.shape(t), b)


def radicand(p: Profile, sc: SeparationConstants, t):
    """rf = c1 - 2 k f on the X axis, rg = c2 + 2 k g on the Y axis."""
    t = np.asarray(t, dtype=float)
    if sc.k == 0.0:
        return np.full(t.shape, sc.c1 if p.axis == "X" else sc.c2)
    if p.axis == "X":
        return -2.0 * sc.k * p.derivatives(t, 0, shift=sc.c1 / (2.0 * sc.k))[0]
    return 2.0 * sc.k * p.derivatives(t, 0, shift=-sc.c2 / (2.0 * sc.k))[0]


def _kappa_anchor(p: Profile, sc: SeparationConstants):
    if sc.k == 0.0:
        return None, None
    if p.axis == "X":
        return -2.0 * sc.k, sc.c1 / (2.0 * sc.k)
    return 2.0 * sc.k, -sc.c2 / (2.0 * sc.k)


def rad_over_slope2(p: Profile, sc: SeparationConstants, t):
    """rad / v'^2 and its t-derivative; finite where the anchor root cancels."""
    t = np.asarray(t, dtype=float)
    kappa, anchor = _kappa_anchor(p, sc)
    root = None if anchor is None else _match_root(p, anchor)
    v, v1, v2 = p.derivatives(t, 2)
    if root is not None:
        d, dd = _deflated(p, t, root)
        ratio = kappa / d
        return ratio, -kappa * dd * v1 / (d * d)
    rad = radicand(p, sc, t)
    drad = 0.0 if kappa is None else kappa * v1
    if np.any(v1 == 0.0):
        raise DerivativeZero(f"{p.axis} profile derivative vanishes at a sample")
    ratio = rad / (v1 * v1)
    return ratio, (drad * v1 - 2.0 * rad * v2) / v1 ** 3


def phi_factors(fp: Profile, gp: Profile, sc: SeparationConstants, x, y):
    """(P, P', Q, Q') with 1 + phi(x, y) = P(x) Q(y)."""
    _check_positive(fp, sc, x)
    _check_positive(gp, sc, y)
    rx, drx = rad_over_slope2(fp, sc, x)
    ry, dry = rad_over_slope2(gp, sc, y)
    P = sc.eps1 * np.sqrt(rx)
    dP = sc.eps1 * 0.5 * drx / np.sqrt(rx)
    Q = sc.eps2 / np.sqrt(ry)
    dQ = -sc.eps2 * 0.5 * dry / ry ** 1.5
    return P, dP, Q, dQ


def _check_positive(p: Profile, sc: SeparationConstants, t):
    rad = radicand(p, sc, t)
    if np.any(rad <= 0.0):
        raise DomainViolation(f"radicand on the {p.axis} axis is not positive at every sample")


def quasi_phi(fp: Profile, gp: Profile, sc: SeparationConstants | None, point) -> float:
    """phi(x, y); -1 for the phi = -1 cases (sc is None)."""
    x, y = point
    if sc is None:
        return -1.0
    P, _, Q, _ = phi_factors(fp, gp, sc, np.asarray([x], float), np.asarray([y], float))
    return float(P[0] * Q[0] - 1.0)


# ---------------------------------------------------------------------------
# N1, N2 and the mixed derivative of T

def _n_terms(p: Profile, sc: SeparationConstants, t):
    """Left-hand sides of the four constancy conditions on one axis."""
    t = np.asarray(t, dtype=float)
    v, v1, v2, v3 = p.derivatives(t, 3)
    rad = radicand(p, sc, t)
    if np.any(rad <= 0.0):
        raise DomainViolation(f"radicand on the {p.axis} axis is not positive at every sample")
    if np.any(v1 == 0.0):
        raise DerivativeZero(f"{p.axis} profile derivative vanishes at a sample")
    k = sc.k
    s2 = v1 * v1
    curv = v2 * v2 - v1 * v3
    den = rad ** 1.5 * np.abs(v1) ** 3
    if p.axis == "X":
        na = -sc.eps1 * (k * k * s2 * s2 + 2 * k * rad * s2 * v2 + rad * rad * curv) / den
        nc = k * sc.eps2 * (2 * k * k * s2 * s2 + k * rad * s2 * v2 - rad * rad * curv) / (2 * den)
    else:
        na = sc.eps2 * (k * k * s2 * s2 - 2 * k * rad * s2 * v2 + rad * rad * curv) / den
        nc = -k * sc.eps1 * (2 * k * k * s2 * s2 - k * rad * s2 * v2 - rad * rad * curv) / (2 * den)
    return na, nc


def _spread(values):
    values = np.asarray(values)
    mean = values.mean()
    return float(np.max(np.abs(values - mean)) / max(1.0, abs(mean)))


def compute_N1_N2(fp: Profile, gp: Profile, sc: SeparationConstants, x_samples, y_samples):
    """Evaluate N1 and N2 from both axes.

    Returns (N1 samples, N2 samples, max deviation).  Samples are ordered x
    first, then y.  The deviation is the largest spread of either set from
    its mean, relative to max(1, |mean|).
    """
    n1x, n2x = _n_terms(fp, sc, x_samples)
    n1y, n2y = _n_terms(gp, sc, y_samples)
    n1 = np.concatenate([n1x, n1y])
    n2 = np.concatenate([n2x, n2y])
    return n1, n2, max(_spread(n1), _spread(n2))


def constancy_ok(values, rtol: float = CONSTANCY_RTOL) -> bool:
    values = np.asarray(values)
    return values.size >= MIN_SAMPLES and _spread(values) < rtol


def mixed_derivative_T(fp: Profile, gp: Profile, sc: SeparationConstants, x, y, hbar: float = 1.0):
    """d^2 T/dx dy on the mesh x (rows) by y (columns).

    Uses the factorisation f' g' (N1a - N1b) + i hbar (N2c - N2d) Q/P.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n1a, n2c = _n_terms(fp, sc, x)
    n1b, n2d = _n_terms(gp, sc, y)
    fd = fp.derivatives(x, 1)[1]
    gd = gp.derivatives(y, 1)[1]
    P, _, Q, _ = phi_factors(fp, gp, sc, x, y)
    real = np.outer(fd * n1a, gd) - np.outer(fd, gd * n1b)
    imag = np.outer(n2c / P, Q) - np.outer(1.0 / P, n2d * Q)
    return real + 1j * hbar * sc.eps1 * sc.eps2 * imag


def phi_minus_one_residual(params: CubicParams, fp: Profile, gp: Profile, x, y):
    """d^2(phi4/g')/dx dy for phi = -1, A = g', B = -f', on the (x, y) mesh."""
    a, b, c = params.alpha, params.beta, params.gamma
    d, xi, mu = params.delta, params.xi, params.mu
    f, f1, f2 = fp.derivatives(np.asarray(x, float), 2)
    g, g1, g2 = gp.derivatives(np.asarray(y, float), 2)
    F, G = f[:, None], g[None, :]
    u = F - G
    dw_f = -a * u * u - (b + d) * u + (xi - c + mu)
    dm_f = -2.0 * a * (F * F - G * F) + b * (G - 2.0 * F) - d * F - 2.0 * c + mu
    cross = -2.0 * a * G + d
    if np.any(g1 == 0.0):
        raise DerivativeZero("g' vanishes at a sample")
    return f1[:, None] * (cross - (dw_f - dm_f - f2[:, None]) * (g2 / (g1 * g1))[None, :])


def separability_residual(case: TheoremCase, params: CubicParams, fp: Profile, gp: Profile,
                          sc: SeparationConstants | None, x, y, hbar: float = 1.0) -> float:
    """Max |mixed derivative| of the relevant separability condition."""
    if case.phi_kind == "ConstantMinusOne" or sc is None:
        return float(np.max(np.abs(phi_minus_one_residual(params, fp, gp, x, y))))
    return float(np.max(np.abs(mixed_derivative_T(fp, gp, sc, x, y, hbar))))


def diagnostics(params: CubicParams, fp: Profile, gp: Profile, sc: SeparationConstants,
                x, y, E: float = 0.0, lam: float = 0.0, hbar: float = 1.0) -> SeparationDiagnostics:
    """Sample phi1..phi4, V1, W1, F1, F2, G1, G2 and d^2T/dxdy."""
    from .fields import build_fields

    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    f, fd, f2 = fp.derivatives(x, 2)
    g, gd, g2 = gp.derivatives(y, 2)
    P, dP, Q, dQ = phi_factors(fp, gp, sc, x, y)
    one_phi = np.outer(P, Q)
    phi = one_phi - 1.0
    G1d = np.broadcast_to(gd[None, :], phi.shape)
    F1d = np.broadcast_to(fd[:, None], phi.shape)
    A = phi / one_phi * G1d
    B = phi * F1d
    A_x = G1d * np.outer(dP, Q) / one_phi ** 2
    B_y = F1d * np.outer(P, dQ)
    _, w_fn, idata = build_fields(params, fp, gp)
    X, Y = np.meshgrid(x, y, indexing="ij")
    W = w_fn(X, Y)
    m = idata.m_fn(X, Y)
    phi4 = (W + 0.5 * A * A * one_phi + 0.5 * B * B + phi * (m - G1d * A - F1d * B)
            - 0.5j * hbar * (one_phi * A_x + B_y) - E - lam * phi)
    rf = radicand(fp, sc, x)
    rg = radicand(gp, sc, y)
    k = sc.k
    diag = SeparationDiagnostics(x=x, y=y)
    diag.phi = {
        "phi1": -0.5 * hbar * hbar * one_phi,
        "phi2": -1j * hbar * A * one_phi + 1j * hbar * phi * G1d,
        "phi3": -1j * hbar * (B - phi * F1d),
        "phi4": phi4,
    }
    diag.v1 = sc.eps1 * np.sqrt(rf) / np.abs(fd)
    diag.w1 = sc.eps2 * np.sqrt(rg) / np.abs(gd)
    diag.f_terms = {
        "F1": sc.eps1 * (-k * fd * fd + rf * f2) / np.abs(fd),
        "F2": sc.eps2 * (k * fd * fd + rf * f2) / (2.0 * rf * fd),
    }
    diag.g_terms = {
        "G1": sc.eps2 * (k * gd * gd + rg * g2) / np.abs(gd),
        "G2": sc.eps1 * (k * gd * gd - rg * g2) / (2.0 * rg * gd),
    }
    diag.t_xy = mixed_derivative_T(fp, gp, sc, x, y, hbar)
    return diag


# ---------------------------------------------------------------------------
# Admissible domain

def _positive_intervals(p: Profile, sc: SeparationConstants, lo: float, hi: float):
    breaks = np.concatenate([[lo, hi], p.poles(lo, hi), p.critical_points(lo, hi)])
    breaks = np.unique(breaks[(breaks >= lo) & (breaks <= hi)])
    guard = 10.0 * p.guard
    out = []
    for a, b in zip(breaks[:-1], breaks[1:]):
        a_in, b_in = a + guard, b - guard
        if b_in <= a_in:
            continue
        ra, rb = (float(radicand(p, sc, [s])[0]) for s in (a_in, b_in))
        if ra > 0 and rb > 0:
            out.append((a, b))
        elif ra > 0 or rb > 0:
            root = brentq(lambda s: float(radicand(p, sc, [s])[0]), a_in, b_in, xtol=1e-14)
            out.append((a, root) if ra > 0 else (root, b))
    return out


def admissible_domain(fp: Profile, gp: Profile, sc: SeparationConstants,
                      window=((-10.0, 10.0), (-10.0, 10.0))):
    """Open intervals inside ``window`` where rf > 0 and rg > 0.

    Poles and zeros of the profile derivative split intervals, since phi is
    evaluated with |f'| and |g'| there.  Raises EmptyDomain when either axis
    has no admissible interval.
    """
    (xl, xh), (yl, yh) = window
    xs = _positive_intervals(fp, sc, xl, xh)
    ys = _positive_intervals(gp, sc, yl, yh)
    if not xs or not ys:
        raise EmptyDomain("no interval with positive radicand on the "
                          + ("X" if not xs else "Y") + " axis")
    return xs, ys


def admissible_samples(intervals, count: int, margin: float = 0.05):
    """``count`` points spread over the given intervals, away from their ends."""
    lengths = np.array([b - a for a, b in intervals])
    share = np.maximum(1, np.round(count * lengths / lengths.sum()).astype(int))
    pts = [np.linspace(a + margin * (b - a), b - margin * (b - a), n)
           for (a, b), n in zip(intervals, share)]
    return np.concatenate(pts)
