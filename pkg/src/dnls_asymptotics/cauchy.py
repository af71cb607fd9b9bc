"""Scalar Cauchy transforms built from the reflection coefficient.

kappa(s) = -log(1 - s|rho(s)|^2) / (2 pi) drives everything here: the
scalar factors delta_l, delta_r (cuts left / right of xi), their local
constants at xi, and the real-line multiplier Delta that turns rho into the
left reflection coefficient.

Integrals run over the rho grid [-Z, Z]; beyond it kappa is continued by
kappa(+-Z) (Z/s)^2.  Near-singular Cauchy integrals subtract kappa at the
closest point of the cut and add the exact logarithm back.
"""

import warnings

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .errors import DomainError, QuadratureError

ABS_TOL = 1e-11
MIN_CUT_DISTANCE = 1e-6
_QUAD_LIMIT = 400
# closer than this to the cut, the subtracted form is used
_NEAR = 1.0


class Kappa:
    """kappa(s) from a ReflectionCoefficient, cubic interpolation of rho."""

    def __init__(self, rc):
        self.source = rc
        self.z_grid = rc.z_grid
        self.Z = float(min(-rc.z_grid[0], rc.z_grid[-1]))
        self._rho = CubicSpline(rc.z_grid, rc.rho)
        self.values = self._formula(rc.z_grid, np.abs(rc.rho) ** 2)
        self.sup_norm = float(np.max(np.abs(self.values)))
        self._edge = (self.values[0], self.values[-1])
        self.trivial = not np.any(rc.rho)

    @staticmethod
    def _formula(s, rho2):
        arg = 1 - s * rho2
        if np.any(arg <= 0):
            bad = np.min(arg)
            raise DomainError(f"1 - s|rho|^2 = {bad:.3e} is not positive")
        return -np.log(arg) / (2 * np.pi)

    def rho(self, s):
        return self._rho(s)

    def margin(self, s):
        s = np.asarray(s, dtype=float)
        return 1 - s * np.abs(self._rho(s)) ** 2

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        out = np.empty(s.shape)
        inside = np.abs(s) <= self.Z
        si = s[inside]
        out[inside] = self._formula(si, np.abs(self._rho(si)) ** 2)
        left = s < -self.Z
        right = s > self.Z
        out[left] = self._edge[0] * (self.Z / s[left]) ** 2
        out[right] = self._edge[1] * (self.Z / s[right]) ** 2
        return out if out.ndim else float(out)

    def derivative(self, s):
        """kappa'(s) from the interpolant (used by the log-weighted integrals)."""
        s = np.asarray(s, dtype=float)
        r = self._rho(s)
        dr = self._rho(s, 1)
        r2 = np.abs(r) ** 2
        dr2 = 2 * np.real(np.conj(r) * dr)
        d = (r2 + s * dr2) / (2 * np.pi * (1 - s * r2))
        tail = np.abs(s) > self.Z
        if np.any(tail):
            st = s[tail] if d.ndim else s
            edge = np.where(st < 0, self._edge[0], self._edge[1])
            dt = -2 * edge * self.Z ** 2 / st ** 3
            if d.ndim:
                d[tail] = dt
            else:
                d = dt
        return d if np.ndim(d) else float(d)


def kappa_eval(rc, s):
    return Kappa(rc)(s)


def _checked_quad(f, lo, hi, points=None, what="Cauchy integral", tol=1e-9):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        val, err = quad(f, lo, hi, complex_func=True, limit=_QUAD_LIMIT, points=points,
                        epsabs=ABS_TOL, epsrel=1e-12)
    err = abs(err)
    if not np.isfinite(val) or err > tol:
        raise QuadratureError(f"{what} did not converge (error estimate {err:.2e})", estimate=err)
    return val


def _segment(kap, lo, hi, z):
    """int_lo^hi kappa(s) / (s - z) ds for z off the open segment."""
    if hi <= lo:
        return 0j
    x0 = min(max(z.real, lo), hi)
    dist = abs(z - x0)
    if dist > _NEAR:
        return _checked_quad(lambda s: kap(s) / (s - z), lo, hi)
    k0 = kap(x0)
    # breakpoints on the scale of the distance, so quad sees the narrow peak
    pts = [p for p in x0 + dist * np.array([-100, -10, -1, 0, 1, 10, 100]) if lo < p < hi] or None
    reg = _checked_quad(lambda s: (kap(s) - k0) / (s - z), lo, hi, pts)
    return reg + k0 * (np.log(hi - z) - np.log(lo - z))


def _tail(kap, side, z):
    # int over |s| > Z of the algebraic tail, kappa_edge Z^2 / (s^2 (s - z))
    Z = kap.Z
    if side < 0:
        edge = kap._edge[0]
        f = lambda s: edge * (Z / s) ** 2 / (s - z)
        return _checked_quad(f, -np.inf, -Z) if edge else 0j
    edge = kap._edge[1]
    f = lambda s: edge * (Z / s) ** 2 / (s - z)
    return _checked_quad(f, Z, np.inf) if edge else 0j


def _check_xi(kap, xi):
    if not -kap.Z < xi < kap.Z:
        raise DomainError(f"xi={xi} outside the rho grid interior (+-{kap.Z})")


def _cut_distance(z, xi, side):
    if side == "left":
        return abs(z.imag) if z.real <= xi else abs(z - xi)
    return abs(z.imag) if z.real >= xi else abs(z - xi)


def left_integral(kap, xi, z):
    """int_{-inf}^xi kappa(s)/(s - z) ds."""
    return _tail(kap, -1, z) + _segment(kap, -kap.Z, xi, z)


def right_integral(kap, xi, z):
    """int_xi^inf kappa(s)/(s - z) ds."""
    return _segment(kap, xi, kap.Z, z) + _tail(kap, 1, z)


def delta_eval(rc, xi, z, side="left", kap=None):
    """delta_l(z) = exp(i int_{-inf}^xi kappa/(s-z)),  delta_r(z) = exp(-i int_xi^inf kappa/(s-z)).

    Orientation of the jumps (upper side + over lower side):
    delta_l+ = delta_l- (1 - s|rho|^2) on s < xi, delta_r+ = delta_r- / (1 - s|rho|^2) on s > xi.
    """
    kap = Kappa(rc) if kap is None else kap
    z = complex(z)
    _check_xi(kap, xi)
    if _cut_distance(z, xi, side) < MIN_CUT_DISTANCE:
        raise DomainError(f"z={z} is within {MIN_CUT_DISTANCE} of the {side} cut")
    if kap.trivial:
        return 1 + 0j
    if side == "left":
        return np.exp(1j * left_integral(kap, xi, z))
    if side == "right":
        return np.exp(-1j * right_integral(kap, xi, z))
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def _regular_left(kap, xi):
    k0 = kap(xi)
    near = _checked_quad(lambda s: (kap(s) - k0) / (s - xi), xi - 1, xi)
    return near + _tail(kap, -1, complex(xi)) + _segment(kap, -kap.Z, xi - 1, complex(xi))


def _regular_right(kap, xi):
    k0 = kap(xi)
    near = _checked_quad(lambda s: (kap(s) - k0) / (s - xi), xi, xi + 1)
    return near + _segment(kap, xi + 1, kap.Z, complex(xi)) + _tail(kap, 1, complex(xi))


def delta0_eval(rc, xi, side="left", kap=None):
    """Constant in delta(z) ~ delta0 (z - xi)^{i kappa(xi)} as z -> xi.

    The power uses the principal branch for the left factor and arg in (0, 2 pi)
    for the right one.
    """
    kap = Kappa(rc) if kap is None else kap
    _check_xi(kap, xi)
    if kap.trivial:
        return 1 + 0j
    if side == "left":
        return np.exp(1j * _regular_left(kap, xi))
    if side == "right":
        return np.exp(np.pi * kap(xi)) * np.exp(-1j * _regular_right(kap, xi))
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def principal_value(kap, lam):
    """p.v. int_{-inf}^{inf} kappa(s)/(s - lam) ds for real lam."""
    lam = float(lam)
    Z = kap.Z
    tails = _tail(kap, -1, complex(lam)) + _tail(kap, 1, complex(lam))
    if abs(lam) >= Z:
        # grid edge or beyond: plain integral over the grid, tails are regular
        if abs(lam) > Z:
            return (_segment(kap, -Z, Z, complex(lam)) + tails).real
        raise DomainError("principal value requested at the grid edge")
    k0 = kap(lam)
    reg = _checked_quad(lambda s: (kap(s) - k0) / (s - lam), -Z, Z, [lam])
    return (reg + k0 * np.log((Z - lam) / (lam + Z)) + tails).real


def delta_multiplier(rc, lam, kap=None):
    """Delta(lam) = exp(2i p.v. int kappa(s)/(lam - s) ds), unimodular on the real line.

    Equivalently exp((1/(pi i)) p.v. int log(1 - s|rho|^2)/(lam - s) ds).
    """
    kap = Kappa(rc) if kap is None else kap
    if kap.trivial:
        return 1 + 0j
    return np.exp(-2j * principal_value(kap, lam))


def breve_rho(rc, z, kap=None):
    """Left reflection coefficient rho(z) / Delta(z)."""
    kap = Kappa(rc) if kap is None else kap
    return complex(kap.rho(z)) / delta_multiplier(rc, z, kap)


def _pieces(f, lo, hi, width=1.0):
    # unit-length pieces keep quad's error budget local
    edges = np.linspace(lo, hi, max(int(np.ceil((hi - lo) / width)), 1) + 1)
    return sum(_checked_quad(f, a, b).real for a, b in zip(edges, edges[1:]))


def stieltjes_log(kap, xi, side="left"):
    """int log|s - xi| d log(1 - s|rho|^2) over (-inf, xi) or (xi, inf).

    By parts this is -2 pi int log|s - xi| kappa'(s) ds.  Within h of xi the
    log singularity is integrated exactly against kappa'(xi).
    """
    h = 0.5
    sgn = -1 if side == "left" else 1
    d0 = kap.derivative(xi)
    f = lambda u: np.log(u) * (kap.derivative(xi + sgn * u) - d0)
    total = _checked_quad(f, 0, h).real + d0 * h * (np.log(h) - 1)
    g = lambda s: np.log(abs(s - xi)) * kap.derivative(s)
    if side == "left":
        if xi - h > -kap.Z:
            total += _pieces(g, -kap.Z, xi - h)
        if kap._edge[0]:
            total += _checked_quad(g, -np.inf, -kap.Z).real
    else:
        if xi + h < kap.Z:
            total += _pieces(g, xi + h, kap.Z)
        if kap._edge[1]:
            total += _checked_quad(g, kap.Z, np.inf).real
    return -2 * np.pi * total


def log_over_s_integral(kap, xi, side="right"):
    """int log(1 - s|rho(s)|^2)/s ds over (xi, inf) or (-inf, xi).

    log(1 - s|rho|^2)/s = -2 pi kappa(s)/s tends to -|rho(0)|^2 at s = 0;
    that value is used at the removable point.
    """
    r00 = abs(complex(kap.rho(0.0))) ** 2

    def f(s):
        s = np.asarray(s, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            v = -2 * np.pi * kap(s) / s
        return np.where(np.abs(s) < 1e-12, -r00, v)

    Z = kap.Z
    if side == "right":
        segs = [(xi, Z)]
        tail = (Z, np.inf) if kap._edge[1] else None
    else:
        segs = [(-Z, xi)]
        tail = (-np.inf, -Z) if kap._edge[0] else None
    total = 0.0
    for lo, hi in segs:
        pts = [0.0] if lo < 0 < hi else None
        total += _checked_quad(lambda s: float(f(s)), lo, hi, pts).real
    if tail is not None:
        total += _checked_quad(lambda s: float(f(s)), *tail).real
    return total
