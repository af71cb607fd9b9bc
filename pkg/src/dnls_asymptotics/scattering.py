"""Direct scattering for the Kaup-Newell type spectral problem.

    Psi' = (-i zeta^2 sigma3 + zeta Q + P) Psi,
    Q = [[0, q], [conj q, 0]],  P = (i/2) diag(-|q|^2, |q|^2).

Writing Psi = exp(-i x zeta^2 sigma3) w removes the fast phase from the
diagonal.  Starting from w(x_min) = I, the transition matrix is
T = w(x_max)^{-1} = [[a, b_breve], [b, a_breve]].
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import make_interp_spline

from .errors import ConsistencyError, IntegrationError

DEFAULTS = {
    "tail_tol": 1e-10,
    "det_tol": 1e-8,
    "ode_rtol": 1e-10,
    "ode_atol": 1e-13,
    "wind_tol": 1e-3,
}


@dataclass
class Potential:
    samples: np.ndarray
    x_min: float
    x_max: float
    tail_tol: float = DEFAULTS["tail_tol"]

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.ndim != 1 or self.n < 2:
            raise ValueError("potential needs at least two samples")
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be smaller than x_max")
        tail = max(abs(self.samples[0]), abs(self.samples[-1]))
        if tail > self.tail_tol:
            raise ValueError(f"potential not negligible at the window edge: {tail:.2e} > {self.tail_tol:.1e}")

    @property
    def n(self):
        return self.samples.shape[0]

    @property
    def x(self):
        return np.linspace(self.x_min, self.x_max, self.n)

    @classmethod
    def from_function(cls, func, x_min=-20.0, x_max=20.0, n=4001, **kw):
        x = np.linspace(x_min, x_max, n)
        return cls(func(x), x_min, x_max, **kw)

    def interpolant(self):
        # quintic spline keeps the adaptive integrator's error control meaningful
        return make_interp_spline(self.x, self.samples, k=5)

    def support(self, floor=1e-18):
        """Smallest sub-window outside which |q| stays below ``floor``."""
        big = np.flatnonzero(np.abs(self.samples) > floor)
        if big.size == 0:
            return None
        x = self.x
        lo = max(big[0] - 3, 0)
        hi = min(big[-1] + 3, self.n - 1)
        return x[lo], x[hi]


@dataclass
class TransitionSample:
    zeta: complex
    a: complex
    b: complex
    a_breve: complex
    b_breve: complex

    @property
    def det_residual(self):
        return abs(self.a * self.a_breve - self.b * self.b_breve - 1)


@dataclass
class ReflectionCoefficient:
    z_grid: np.ndarray
    rho: np.ndarray
    c_margin: float = field(init=False)

    def __post_init__(self):
        self.z_grid = np.asarray(self.z_grid, dtype=float)
        self.rho = np.asarray(self.rho, dtype=complex)
        if np.any(np.diff(self.z_grid) <= 0):
            raise ValueError("z grid must be strictly increasing")
        self.c_margin = float(np.min(1 - self.z_grid * np.abs(self.rho) ** 2))

    @property
    def soliton_suspect(self):
        return not self.c_margin > 0

    @property
    def edge_decay(self):
        """|z^2 rho(z)| at both grid ends."""
        return float(np.max(np.abs(self.z_grid[[0, -1]] ** 2 * self.rho[[0, -1]])))

    def to_dict(self):
        return {
            "z_grid": self.z_grid.tolist(),
            "rho_re": self.rho.real.tolist(),
            "rho_im": self.rho.imag.tolist(),
            "c_margin": self.c_margin,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["z_grid"]), np.array(d["rho_re"]) + 1j * np.array(d["rho_im"]))


def _integrate(q, coupling, rtol, atol, label):
    """Propagate the 2x2 oscillation-free system across the potential's support.

    ``coupling(x, qx)`` returns the off-diagonal pair (B12, B21).
    """
    win = q.support()
    if win is None:
        return np.eye(2, dtype=complex)
    spline = q.interpolant()

    def rhs(x, y):
        qx = complex(spline(x))
        d = 0.5j * (qx.real ** 2 + qx.imag ** 2)
        b12, b21 = coupling(x, qx)
        w11, w12, w21, w22 = y
        return [
            -d * w11 + b12 * w21,
            -d * w12 + b12 * w22,
            b21 * w11 + d * w21,
            b21 * w12 + d * w22,
        ]

    sol = solve_ivp(rhs, win, np.array([1, 0, 0, 1], dtype=complex), method="DOP853",
                    rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationError(f"spectral ODE failed at {label}: {sol.message}", zeta=label)
    return sol.y[:, -1].reshape(2, 2)


def _transition(w_end):
    # det w = 1, so the inverse is the adjugate
    return np.array([[w_end[1, 1], -w_end[0, 1]], [-w_end[1, 0], w_end[0, 0]]])


def jost_transition(q, zeta, rtol=DEFAULTS["ode_rtol"], atol=DEFAULTS["ode_atol"],
                    det_tol=DEFAULTS["det_tol"], check=True):
    """Transition coefficients a, b, a_breve, b_breve at one spectral point."""
    zeta = complex(zeta)
    zz = zeta * zeta

    def coupling(x, qx):
        ph = np.exp(2j * x * zz)
        return zeta * qx * ph, zeta * qx.conjugate() / ph

    t = _transition(_integrate(q, coupling, rtol, atol, zeta))
    sample = TransitionSample(zeta, t[0, 0], t[1, 0], t[1, 1], t[0, 1])
    if check and sample.det_residual > det_tol:
        raise ConsistencyError(f"determinant relation off by {sample.det_residual:.2e} at zeta={zeta}")
    return sample


def spectral_zeta(z):
    """Representative zeta with zeta^2 = z on the real or imaginary axis."""
    return np.sqrt(z) if z >= 0 else 1j * np.sqrt(-z)


def _rho_at_zero(q, rtol, atol):
    # similarity by diag(zeta, 1) leaves only zeta^2 in the system, so the
    # limit zeta^{-1} b_breve / a at zeta = 0 is read off directly
    def coupling(x, qx):
        return qx, 0.0

    t = _transition(_integrate(q, coupling, rtol, atol, 0j))
    return t[0, 1] / t[0, 0]


def reflection_map(q, z_grid, rtol=DEFAULTS["ode_rtol"], atol=DEFAULTS["ode_atol"],
                   det_tol=DEFAULTS["det_tol"]):
    """rho(z) = zeta^{-1} b_breve(zeta) / a(zeta) with zeta^2 = z."""
    z_grid = np.asarray(z_grid, dtype=float)
    rho = np.empty(z_grid.shape, dtype=complex)
    for i, z in enumerate(z_grid):
        if z == 0:
            rho[i] = _rho_at_zero(q, rtol, atol)
            continue
        s = jost_transition(q, spectral_zeta(z), rtol, atol, det_tol)
        rho[i] = s.b_breve / (s.zeta * s.a)
    return ReflectionCoefficient(z_grid, rho)


def symmetric_grid(z_max=8.0, n=257):
    if n % 2 == 0:
        raise ValueError("use an odd node count so the grid is symmetric about 0")
    return np.linspace(-z_max, z_max, n)


def winding_number(q, corners=(0.02, 3.0), n_points=512, wind_tol=DEFAULTS["wind_tol"],
                   rtol=1e-8, atol=1e-11):
    """Winding of a(zeta) around the square [lo, hi] x [-hi, -lo] in {Im zeta^2 < 0}.

    Returns (winding, min |a| on the contour, samples).
    """
    lo, hi = corners
    per_side = max(n_points // 4, 8)
    s = np.linspace(0, 1, per_side, endpoint=False)
    path = np.concatenate([
        lo + (hi - lo) * s - 1j * lo,
        hi - 1j * (lo + (hi - lo) * s),
        hi - (hi - lo) * s - 1j * hi,
        lo - 1j * (hi - (hi - lo) * s),
    ])
    vals = np.array([jost_transition(q, zeta, rtol, atol, check=False).a for zeta in path])
    steps = np.angle(np.roll(vals, -1) / vals)
    winding = int(np.rint(steps.sum() / (2 * np.pi)))
    return winding, float(np.min(np.abs(vals))), vals


def soliton_free_report(rc, q, n_points=512, wind_tol=DEFAULTS["wind_tol"], corners=(0.02, 3.0)):
    winding, a_min, _ = winding_number(q, corners, n_points, wind_tol)
    inconclusive = a_min < wind_tol
    return {
        "c_margin": rc.c_margin,
        "winding": winding,
        "min_abs_a_on_contour": a_min,
        "inconclusive": inconclusive,
        "soliton_free": (rc.c_margin > 0) and winding == 0 and not inconclusive,
    }
