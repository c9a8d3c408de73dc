"""Closed-form profile functions f(x) and g(y).

Every profile solves a one-dimensional equation

    v'' = a v^2 + b v + c,        v'^2 = (2/3) a v^3 + b v^2 + 2 c v + sigma,

with (a, b, c) = (alpha, beta, gamma) on the X axis and (-alpha, delta, xi) on
the Y axis.  When a != 0 the solution is one of seven catalogue shapes built
from the roots of the cubic on the right.  Profiles with a < 0 are stored as
``v = -h`` where ``h`` solves the mirrored equation with a positive quadratic
coefficient, so a single set of closed forms serves both signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi, sqrt

import numpy as np
from numpy.polynomial import Polynomial

POLE_GUARD = 1e-6

ELEMENTARY = ("Linear", "Quadratic", "Exponential", "Oscillatory")
CATALOGUE = ("InversePowerA", "TrigB", "TanhC", "CotanhD",
             "EllipticSnE", "EllipticSnF", "EllipticCnG")
CASE_TAGS = ELEMENTARY + CATALOGUE

_CONFIG_NAMES = {
    "linear": "Linear", "quadratic": "Quadratic", "exponential": "Exponential",
    "oscillatory": "Oscillatory", "inverse_power_a": "InversePowerA",
    "trig_b": "TrigB", "tanh_c": "TanhC", "cotanh_d": "CotanhD",
    "elliptic_sn_e": "EllipticSnE", "elliptic_sn_f": "EllipticSnF",
    "elliptic_cn_g": "EllipticCnG",
    "a": "InversePowerA", "b": "TrigB", "c": "TanhC", "d": "CotanhD",
    "e": "EllipticSnE", "f": "EllipticSnF", "g": "EllipticCnG",
}


class SingularPoint(ValueError):
    """Evaluation requested too close to a pole of the profile."""


class InvalidCase(ValueError):
    """Profile data inconsistent with the requested catalogue case."""


def case_tag(name: str) -> str:
    """Normalise a config-style case name (``"tanh_c"``) to its tag."""
    if name in CASE_TAGS:
        return name
    try:
        return _CONFIG_NAMES[name.lower()]
    except KeyError:
        raise InvalidCase(f"unknown profile case {name!r}") from None


@dataclass(frozen=True)
class CubicParams:
    """Model constants of the profile equations and the effective potential."""

    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    delta: float = 0.0
    xi: float = 0.0
    mu: float = 0.0
    sigma1: float = 0.0
    sigma2: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta", "xi", "mu", "sigma1", "sigma2"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)

    def ode(self, axis: str) -> tuple[float, float, float]:
        """Coefficients (a, b, c) of v'' = a v^2 + b v + c for one axis."""
        if axis == "X":
            return (self.alpha, self.beta, self.gamma)
        if axis == "Y":
            return (-self.alpha, self.delta, self.xi)
        raise ValueError(f"axis must be 'X' or 'Y', got {axis!r}")

    def sigma(self, axis: str) -> float:
        return self.sigma1 if axis == "X" else self.sigma2

    def sign_flipped(self) -> "CubicParams":
        """Parameters after f -> -f, g -> -g (alpha, gamma, xi, mu change sign)."""
        return CubicParams(-self.alpha, self.beta, -self.gamma, self.delta,
                           -self.xi, -self.mu, self.sigma1, self.sigma2)


# ---------------------------------------------------------------------------
# Jacobi elliptic functions

def _agm_chain(k: float):
    a, b, c = 1.0, sqrt(max(0.0, 1.0 - k * k)), k
    a_s, c_s = [a], [c]
    for _ in range(64):
        if abs(c) <= 1e-17 * a:
            break
        a, b, c = 0.5 * (a + b), sqrt(a * b), 0.5 * (a - b)
        a_s.append(a)
        c_s.append(c)
    return a_s, c_s


def ellipk(k: float) -> float:
    """Complete elliptic integral of the first kind K(k), modulus convention."""
    if not 0.0 <= k < 1.0:
        raise ValueError("ellipk requires 0 <= k < 1")
    a_s, _ = _agm_chain(k)
    return pi / (2.0 * a_s[-1])


def jacobi_sn_cn_dn(u, k: float):
    """Jacobi sn, cn, dn by the descending Landen (AGM) recursion.

    ``k`` is the modulus (not the parameter m = k^2).  Works elementwise on
    arrays.  Arguments are first reduced modulo the real period 4K(k).
    """
    k = float(k)
    if not 0.0 <= k <= 1.0:
        raise ValueError("modulus must lie in [0, 1]")
    u = np.asarray(u, dtype=float)
    if k == 0.0:
        return np.sin(u), np.cos(u), np.ones_like(u)
    if k == 1.0:
        sech = 1.0 / np.cosh(u)
        return np.tanh(u), sech, sech.copy()
    a_s, c_s = _agm_chain(k)
    n = len(a_s) - 1
    period = 2.0 * pi / a_s[-1]  # 4K
    ur = u - period * np.round(u / period)
    phi = (2.0 ** n) * a_s[-1] * ur
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c_s[j] / a_s[j] * np.sin(phi)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    kp2 = (1.0 - k) * (1.0 + k)
    dn = np.sqrt(cn * cn + kp2 * sn * sn)
    return sn, cn, dn


# ---------------------------------------------------------------------------
# Profiles

# Riccati families: the profile is a polynomial in v with dv/du = c0 + c2 v^2.
_RICCATI = {
    "InversePowerA": (0.0, -1.0),   # v = 1/u
    "TrigB": (-1.0, -1.0),          # v = cot(w u)
    "TanhC": (1.0, -1.0),           # v = tanh(w u)
    "CotanhD": (1.0, -1.0),         # v = coth(w u)
}


def _close(a, b, scale=1.0, rtol=1e-9):
    return abs(a - b) <= rtol * max(1.0, abs(scale), abs(a), abs(b))


@dataclass(frozen=True)
class Profile:
    """A closed-form solution v(t) of the profile equation on one axis.

    ``roots`` are the roots of the cubic (ascending when real; ``(r, p, q)``
    for one real root r and the pair p +- i q).  ``coefficients`` hold the
    amplitudes of the elementary families: ``(slope, intercept)`` for Linear,
    ``(v0,)`` for Quadratic, ``(c_plus, c_minus)`` for Exponential and
    ``(amplitude,)`` for Oscillatory.  ``ode`` is the triple (a, b, c).
    """

    axis: str
    case_tag: str
    ode: tuple
    x0: float = 0.0
    roots: tuple = ()
    omega: float | None = None
    coefficients: tuple = ()
    guard: float = POLE_GUARD
    modulus: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.axis not in ("X", "Y"):
            raise InvalidCase(f"axis must be 'X' or 'Y', got {self.axis!r}")
        object.__setattr__(self, "case_tag", case_tag(self.case_tag))
        object.__setattr__(self, "ode", tuple(float(c) for c in self.ode))
        object.__setattr__(self, "roots", tuple(float(r) for r in self.roots))
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        object.__setattr__(self, "x0", float(self.x0))
        if self.case_tag in ELEMENTARY:
            self._check_elementary()
        else:
            self._check_catalogue()

    # -- validation -------------------------------------------------------
    def _check_elementary(self):
        a, b, c = self.ode
        tag = self.case_tag
        if a != 0.0:
            raise InvalidCase(f"{tag} profiles need a vanishing quadratic coefficient")
        need = {"Linear": 2, "Quadratic": 1, "Exponential": 2, "Oscillatory": 1}[tag]
        if len(self.coefficients) != need:
            raise InvalidCase(f"{tag} profiles take {need} coefficient(s)")
        if tag == "Linear" and (b != 0.0 or c != 0.0):
            raise InvalidCase("Linear profiles need b = c = 0")
        if tag == "Quadratic" and (b != 0.0 or c == 0.0):
            raise InvalidCase("Quadratic profiles need b = 0 and c != 0")
        if tag == "Exponential" and b <= 0.0:
            raise InvalidCase("Exponential profiles need b > 0")
        if tag == "Oscillatory" and b >= 0.0:
            raise InvalidCase("Oscillatory profiles need b < 0")
        if tag in ("Exponential", "Oscillatory"):
            w = sqrt(abs(b))
            if self.omega is not None and not _close(self.omega, w):
                raise InvalidCase(f"omega {self.omega} inconsistent with sqrt|b| = {w}")
            object.__setattr__(self, "omega", w)

    def _check_catalogue(self):
        a, b, c = self.ode
        tag = self.case_tag
        if a == 0.0:
            raise InvalidCase(f"{tag} profiles need a nonzero quadratic coefficient")
        if len(self.roots) != 3:
            raise InvalidCase(f"{tag} profiles need three root entries")
        s = 1.0 if a > 0 else -1.0
        big_a = abs(a)
        if tag == "EllipticCnG":
            r, p, q = self.roots
            if q <= 0.0:
                raise InvalidCase("EllipticCnG needs the imaginary part q > 0")
            hr, hp = s * r, s * p
            e1, e2, e3 = hr + 2 * hp, 2 * hp * hr + hp * hp + q * q, hr * (hp * hp + q * q)
        else:
            h = sorted(s * x for x in self.roots)
            e1, e2, e3 = h[0] + h[1] + h[2], h[0] * h[1] + h[0] * h[2] + h[1] * h[2], h[0] * h[1] * h[2]
            scale = max(1.0, *(abs(x) for x in h))
            tol = 1e-9 * scale
            eq01, eq12 = abs(h[1] - h[0]) <= tol, abs(h[2] - h[1]) <= tol
            ok = {
                "InversePowerA": eq01 and eq12,
                "TrigB": eq01 and not eq12,
                "TanhC": eq12 and not eq01,
                "CotanhD": eq12 and not eq01,
                "EllipticSnE": not eq01 and not eq12,
                "EllipticSnF": not eq01 and not eq12,
            }[tag]
            if not ok:
                raise InvalidCase(f"root multiplicities {self.roots} do not match {tag}")
        # the mirrored equation h'' = A h^2 + B h + C fixes B and C from the roots
        hb, hc = -(2.0 * big_a / 3.0) * e1, (big_a / 3.0) * e2
        scale = max(abs(hb), abs(hc), big_a * max(1.0, e1 * e1))
        if not (_close(hb, b, scale) and _close(hc, s * c, scale)):
            raise InvalidCase(f"roots {self.roots} inconsistent with ode coefficients {self.ode}")
        object.__setattr__(self, "_sigma", -(2.0 * big_a / 3.0) * e3)
        w, kmod = self._frequency()
        if tag != "InversePowerA":
            if self.omega is not None and not _close(self.omega, w):
                raise InvalidCase(f"omega {self.omega} inconsistent with roots (expected {w})")
            object.__setattr__(self, "omega", w)
        object.__setattr__(self, "modulus", kmod)

    def _frequency(self):
        big_a = abs(self.ode[0])
        tag = self.case_tag
        if tag == "InversePowerA":
            return None, None
        if tag == "EllipticCnG":
            hr, hp, q = self._hroots()
            am = sqrt((hp - hr) ** 2 + q * q)
            rho = sqrt(2.0 * big_a * am / 3.0)
            kmod = sqrt(min(1.0, max(0.0, (am - hr + hp) / (2.0 * am))))
            return rho, kmod
        h1, h2, h3 = self._hroots()
        w = sqrt(big_a * (h3 - h1) / 6.0)
        kmod = sqrt((h2 - h1) / (h3 - h1)) if tag.startswith("Elliptic") else None
        return w, kmod

    # -- derived data -------------------------------------------------------
    @property
    def mirror(self) -> float:
        """+1 if the profile is the catalogue function itself, -1 if mirrored."""
        return -1.0 if self.ode[0] < 0 else 1.0

    def _hroots(self):
        s = self.mirror
        if self.case_tag == "EllipticCnG":
            r, p, q = self.roots
            return s * r, s * p, q
        return tuple(sorted(s * x for x in self.roots))

    @property
    def sigma(self) -> float:
        """First-integral constant implied by the profile itself."""
        a, b, c = self.ode
        tag = self.case_tag
        if tag in CATALOGUE:
            return self._sigma
        if tag == "Linear":
            return self.coefficients[0] ** 2
        if tag == "Quadratic":
            return -2.0 * c * self.coefficients[0]
        if tag == "Exponential":
            cp, cm = self.coefficients
            return c * c / b - 4.0 * b * cp * cm
        amp = self.coefficients[0]
        return c * c / b - b * amp * amp

    @property
    def period(self) -> float | None:
        """Real period of the profile, or None for aperiodic shapes."""
        tag = self.case_tag
        if tag == "TrigB":
            return pi / self.omega
        if tag == "Oscillatory":
            return 2.0 * pi / self.omega
        if tag in ("EllipticSnE", "EllipticSnF"):
            return 2.0 * ellipk(self.modulus) / self.omega
        if tag == "EllipticCnG":
            return 4.0 * ellipk(self.modulus) / self.omega
        return None

    def poles(self, lo: float, hi: float) -> np.ndarray:
        """Poles of the profile inside [lo, hi]."""
        tag = self.case_tag
        if tag in ("InversePowerA", "CotanhD"):
            pts = np.array([self.x0])
        elif tag in ("TrigB", "EllipticSnF"):
            pts = self._lattice(lo, hi, 0.0, self.period)
        elif tag == "EllipticCnG":
            pts = self._lattice(lo, hi, 0.5 * self.period, self.period)
        else:
            pts = np.array([])
        return pts[(pts >= lo) & (pts <= hi)]

    def critical_points(self, lo: float, hi: float) -> np.ndarray:
        """Zeros of the first derivative inside [lo, hi]."""
        tag = self.case_tag
        if tag in ("Quadratic", "TanhC"):
            pts = np.array([self.x0])
        elif tag == "Exponential":
            cp, cm = self.coefficients
            pts = np.array([self.x0 + np.log(cm / cp) / (2 * self.omega)]) if cp * cm > 0 else np.array([])
        elif tag == "Oscillatory":
            pts = self._lattice(lo, hi, 0.0, 0.5 * self.period)
        elif tag == "TrigB":
            pts = self._lattice(lo, hi, 0.5 * self.period, self.period)
        elif tag == "EllipticSnE":
            pts = self._lattice(lo, hi, 0.0, 0.5 * self.period)
        elif tag == "EllipticSnF":
            pts = self._lattice(lo, hi, 0.5 * self.period, self.period)
        elif tag == "EllipticCnG":
            pts = self._lattice(lo, hi, 0.0, self.period)
        else:
            pts = np.array([])
        return pts[(pts >= lo) & (pts <= hi)]

    def _lattice(self, lo, hi, shift, step):
        j0 = np.floor((lo - self.x0 - shift) / step)
        j1 = np.ceil((hi - self.x0 - shift) / step)
        return self.x0 + shift + step * np.arange(j0, j1 + 1)

    def pole_distance(self, t) -> np.ndarray:
        """Distance from each t to the nearest pole (inf when pole-free)."""
        t = np.asarray(t, dtype=float)
        tag = self.case_tag
        if tag in ("InversePowerA", "CotanhD"):
            return np.abs(t - self.x0)
        if tag in ("TrigB", "EllipticSnF", "EllipticCnG"):
            per = self.period
            shift = 0.5 * per if tag == "EllipticCnG" else 0.0
            r = np.mod(t - self.x0 - shift, per)
            return np.minimum(r, per - r)
        return np.full(t.shape, np.inf)

    # -- evaluation -------------------------------------------------------
    def derivatives(self, t, order: int = 2, shift: float | None = None):
        """Value and derivatives up to ``order`` (at most 3) at ``t``.

        With ``shift`` given, the first entry is ``v(t) - shift`` evaluated so
        that a root offset cancels exactly instead of by subtraction.
        """
        t = np.asarray(t, dtype=float)
        if np.any(self.pole_distance(t) < self.guard):
            raise SingularPoint(f"{self.case_tag} profile evaluated within {self.guard} of a pole")
        tag = self.case_tag
        u = t - self.x0
        if tag in ELEMENTARY:
            out = list(self._elementary(u))
            if shift is not None:
                out[0] = out[0] - shift
            return tuple(out[: order + 1])
        s = self.mirror
        base, amp, d = self._catalogue(u)
        if shift is not None:
            value = s * (base - s * shift) + s * amp * d[0]
        else:
            value = s * (base + amp * d[0])
        h = base + amp * d[0]
        h1, h2 = amp * d[1], amp * d[2]
        big_a, hb = abs(self.ode[0]), self.ode[1]
        h3 = (2.0 * big_a * h + hb) * h1 if len(d) < 4 else amp * d[3]
        out = (value, s * h1, s * h2, s * h3)
        return out[: order + 1]

    def _elementary(self, u):
        a, b, c = self.ode
        tag = self.case_tag
        zero = np.zeros_like(u)
        if tag == "Linear":
            slope, intercept = self.coefficients
            return intercept + slope * u, slope + zero, zero, zero
        if tag == "Quadratic":
            v0 = self.coefficients[0]
            return v0 + 0.5 * c * u * u, c * u, c + zero, zero
        w = self.omega
        if tag == "Exponential":
            cp, cm = self.coefficients
            ep, em = cp * np.exp(w * u), cm * np.exp(-w * u)
            return (ep + em - c / b, w * (ep - em), w * w * (ep + em), w ** 3 * (ep - em))
        amp = self.coefficients[0]
        cs, sn = amp * np.cos(w * u), amp * np.sin(w * u)
        return cs - c / b, -w * sn, -w * w * cs, w ** 3 * sn

    def _catalogue(self, u):
        """Return (base, amplitude, [S, S', S'', (S''')]) with h = base + amplitude*S."""
        tag = self.case_tag
        big_a = abs(self.ode[0])
        hr = self._hroots()
        if tag in _RICCATI:
            c0, c2 = _RICCATI[tag]
            if tag == "InversePowerA":
                w, var = 1.0, 1.0 / u
                poly, base, amp = Polynomial([0, 0, 1]), hr[0], 6.0 / big_a
            else:
                w = self.omega
                x = w * u
                if tag == "TrigB":
                    var = np.cos(x) / np.sin(x)
                    poly, base, amp = Polynomial([1, 0, 1]), hr[0], hr[2] - hr[0]
                elif tag == "TanhC":
                    var = np.tanh(x)
                    poly, base, amp = Polynomial([0, 0, 1]), hr[0], hr[2] - hr[0]
                else:
                    var = 1.0 / np.tanh(x)
                    poly, base, amp = Polynomial([0, 0, 1]), hr[0], hr[2] - hr[0]
            rate = Polynomial([c0, 0, c2])
            d = [poly(var)]
            q = poly
            for n in range(1, 4):
                q = q.deriv() * rate
                d.append(w ** n * q(var))
            return base, amp, d
        w = self.omega
        sn, cn, dn = jacobi_sn_cn_dn(w * u, self.modulus)
        k2 = self.modulus ** 2
        if tag == "EllipticCnG":
            r, p, q = hr
            am = sqrt((p - r) ** 2 + q * q)
            c1 = -sn * dn
            c2 = -cn * dn * dn + k2 * sn * sn * cn
            one = 1.0 + cn
            z = (1.0 - cn) / one
            z1 = -2.0 * c1 / one ** 2
            z2 = -2.0 * c2 / one ** 2 + 4.0 * c1 * c1 / one ** 3
            return r, am, [z, w * z1, w * w * z2]
        sq = sn * sn
        s1 = 2.0 * sn * cn * dn
        s2 = 2.0 - 4.0 * (1.0 + k2) * sq + 6.0 * k2 * sq * sq
        if tag == "EllipticSnE":
            return hr[0], hr[1] - hr[0], [sq, w * s1, w * w * s2]
        t0 = 1.0 / sq
        t1 = -s1 / sq ** 2
        t2 = -s2 / sq ** 2 + 2.0 * s1 * s1 / sq ** 3
        return hr[0], hr[2] - hr[0], [t0, w * t1, w * w * t2]

    def __call__(self, t):
        return self.derivatives(t, 0)[0]


def eval_profile(p: Profile, t):
    """Value, first and second derivative of a profile at ``t``."""
    return p.derivatives(t, 2)


def profile_residuals(p: Profile, params: CubicParams, sample_points):
    """Max absolute residuals of the profile ODE and of its first integral.

    The equation and the constant ``sigma`` are taken from ``params`` so a
    profile paired with the wrong parameters shows up here.
    """
    t = np.asarray(sample_points, dtype=float)
    v, v1, v2 = eval_profile(p, t)
    a, b, c = params.ode(p.axis)
    sig = params.sigma(p.axis)
    ode = v2 - (a * v * v + b * v + c)
    fi = v1 * v1 - ((2.0 / 3.0) * a * v ** 3 + b * v * v + 2.0 * c * v + sig)
    return float(np.max(np.abs(ode))), float(np.max(np.abs(fi)))


# ---------------------------------------------------------------------------
# Constructors

def _mirrored(params: CubicParams, axis: str):
    a, b, c = params.ode(axis)
    s = 1.0 if a > 0 else -1.0
    return s, abs(a), b, s * c


def catalogue_roots(params: CubicParams, axis: str, case: str) -> tuple:
    """Roots of the profile cubic forced by ``case`` (actual profile values).

    Cases a-d are fixed by (a, b, c) alone; cases e-g use the axis sigma.
    """
    tag = case_tag(case)
    s, big_a, hb, hc = _mirrored(params, axis)
    if big_a == 0.0:
        raise InvalidCase("catalogue cases need alpha != 0")
    disc2 = hb * hb - 4.0 * big_a * hc
    if tag == "InversePowerA":
        if abs(disc2) > 1e-12 * max(1.0, hb * hb, abs(4 * big_a * hc)):
            raise InvalidCase("case a needs a vanishing discriminant b^2 - 4ac")
        r = -hb / (2.0 * big_a)
        h = (r, r, r)
    elif tag in ("TrigB", "TanhC", "CotanhD"):
        if disc2 <= 0.0:
            raise InvalidCase("cases b, c and d need a positive discriminant b^2 - 4ac")
        dd = sqrt(disc2)
        if tag == "TrigB":
            lo = (-hb - dd) / (2.0 * big_a)
            h = (lo, lo, (-hb + 2.0 * dd) / (2.0 * big_a))
        else:
            hi = (-hb + dd) / (2.0 * big_a)
            h = ((-hb - 2.0 * dd) / (2.0 * big_a), hi, hi)
    else:
        sig = params.sigma(axis)
        z = np.roots([2.0 * big_a / 3.0, hb, 2.0 * hc, sig])
        real = np.sort(z[np.abs(z.imag) <= 1e-10 * np.maximum(1.0, np.abs(z))].real)
        if tag == "EllipticCnG":
            if len(real) != 1:
                raise InvalidCase("case g needs exactly one real root")
            pair = z[np.abs(z.imag) > 1e-10 * np.maximum(1.0, np.abs(z))]
            p, q = float(pair[0].real), float(abs(pair[0].imag))
            return (s * float(real[0]), s * p, q)
        if len(real) != 3 or np.min(np.diff(real)) <= 1e-9 * max(1.0, np.max(np.abs(real))):
            raise InvalidCase("cases e and f need three distinct real roots")
        h = tuple(float(x) for x in real)
    return tuple(sorted(s * x for x in h))


def catalogue_profile(params: CubicParams, axis: str, case: str, x0: float = 0.0,
                      roots=None, omega=None) -> Profile:
    """Build a catalogue profile; roots default to those forced by ``params``."""
    tag = case_tag(case)
    if roots is None:
        roots = catalogue_roots(params, axis, tag)
    return Profile(axis, tag, params.ode(axis), x0=x0, roots=tuple(roots), omega=omega)


def elementary_profile(params: CubicParams, axis: str, case: str, coefficients,
                       x0: float = 0.0) -> Profile:
    return Profile(axis, case_tag(case), params.ode(axis), x0=x0,
                   coefficients=tuple(coefficients))


def params_from_roots(alpha: float, roots, axis: str = "X", base: CubicParams | None = None) -> CubicParams:
    """CubicParams whose ``axis`` equation has the given real cubic roots.

    Other constants are copied from ``base``.  ``alpha`` is the model alpha
    (so a Y profile gets quadratic coefficient -alpha).
    """
    base = base or CubicParams(alpha=alpha)
    a = alpha if axis == "X" else -alpha
    r = np.asarray(roots, dtype=float)
    e1 = r.sum()
    e2 = r[0] * r[1] + r[0] * r[2] + r[1] * r[2]
    e3 = r.prod()
    b = -(2.0 * a / 3.0) * e1
    c = (a / 3.0) * e2
    sig = -(2.0 * a / 3.0) * e3
    kw = dict(base.__dict__)
    kw["alpha"] = alpha
    if axis == "X":
        kw.update(beta=b, gamma=c, sigma1=sig)
    else:
        kw.update(delta=b, xi=c, sigma2=sig)
    return CubicParams(**kw)


def profile_from_config(section: dict, params: CubicParams, axis: str) -> Profile:
    """Build a profile from a config table (``case``, ``roots``, ``omega``, ``x0``, ``coefficients``)."""
    if "case" not in section:
        raise KeyError("case")
    tag = case_tag(str(section["case"]))
    x0 = float(section.get("x0", 0.0))
    if tag in ELEMENTARY:
        if "coefficients" not in section:
            raise KeyError("coefficients")
        return elementary_profile(params, axis, tag, section["coefficients"], x0)
    return catalogue_profile(params, axis, tag, x0, section.get("roots"), section.get("omega"))
